#pragma once

// Text inputs: corpus and query files are JSONL with {"id": ..., "text": ...}
// per line; qrels are TSV lines "query_id<TAB>doc_id" (duplicates ignored,
// blank lines and '#' comments skipped).

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dvlab/bm25.hpp"
#include "dvlab/metrics.hpp"

namespace dvlab {

std::vector<Document> read_documents_jsonl(std::istream& in);
std::vector<Document> read_documents_jsonl(const std::filesystem::path& path);
void write_documents_jsonl(const std::vector<Document>& docs, std::ostream& out);
void write_documents_jsonl(const std::vector<Document>& docs, const std::filesystem::path& path);

Qrels read_qrels_tsv(std::istream& in);
Qrels read_qrels_tsv(const std::filesystem::path& path);
void write_qrels_tsv(const Qrels& qrels, std::ostream& out);

}  // namespace dvlab
