#pragma once

// Embedding files.
//
// Binary "DVEC" layout, all integers little-endian:
//   magic "DVEC" | version u32 (=1) | dimension u32 | count u64 |
//   count x ( id length u16 | id bytes (UTF-8) | dimension x float32 )
//
// JSONL alternative: one {"id": string, "vector": [numbers]} object per line.
//
// Vectors are held as doubles in memory and narrowed to float32 on binary
// write, so DVEC -> memory -> DVEC is bit-exact.

#include <filesystem>
#include <iosfwd>

#include "dvlab/embedding.hpp"

namespace dvlab {

inline constexpr std::uint32_t kDvecVersion = 1;

void write_dvec(const EmbeddingMatrix& m, std::ostream& out);
void write_dvec(const EmbeddingMatrix& m, const std::filesystem::path& path);
/// FormatError on bad magic/version or invalid content; IoError on truncation.
EmbeddingMatrix read_dvec(std::istream& in);
EmbeddingMatrix read_dvec(const std::filesystem::path& path);

void write_embeddings_jsonl(const EmbeddingMatrix& m, std::ostream& out);
void write_embeddings_jsonl(const EmbeddingMatrix& m, const std::filesystem::path& path);
EmbeddingMatrix read_embeddings_jsonl(std::istream& in);
EmbeddingMatrix read_embeddings_jsonl(const std::filesystem::path& path);

/// Picks the format by extension: ".jsonl"/".json" vs anything else (DVEC).
EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path);

}  // namespace dvlab
