#include "dvlab/corpus_io.hpp"

#include <fstream>
#include <string>
#include <unordered_set>

#include <json.hpp>

#include "dvlab/errors.hpp"

namespace dvlab {

std::vector<Document> read_documents_jsonl(std::istream& in) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto obj = nlohmann::json::parse(line);
            Document d{obj.at("id").get<std::string>(), obj.at("text").get<std::string>()};
            if (d.id.empty()) throw DomainError("empty id");
            if (!seen.insert(d.id).second) throw DomainError("duplicate id '" + d.id + "'");
            docs.push_back(std::move(d));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("JSONL line " + std::to_string(line_no) + ": " + e.what());
        } catch (const DomainError& e) {
            throw FormatError("JSONL line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return docs;
}

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_documents_jsonl(in);
}

void write_documents_jsonl(const std::vector<Document>& docs, std::ostream& out) {
    for (const auto& d : docs) {
        nlohmann::ordered_json obj;
        obj["id"] = d.id;
        obj["text"] = d.text;
        out << obj.dump() << '\n';
    }
    if (!out) throw IoError("failed writing JSONL");
}

void write_documents_jsonl(const std::vector<Document>& docs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_documents_jsonl(docs, out);
}

Qrels read_qrels_tsv(std::istream& in) {
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw FormatError("qrels line " + std::to_string(line_no) + ": expected 'query_id<TAB>doc_id'");
        }
        const auto q = line.substr(0, tab);
        const auto d = line.substr(tab + 1);
        if (q.empty() || d.empty()) throw FormatError("qrels line " + std::to_string(line_no) + ": empty id");
        qrels.add(q, d);
    }
    return qrels;
}

Qrels read_qrels_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_qrels_tsv(in);
}

void write_qrels_tsv(const Qrels& qrels, std::ostream& out) {
    for (const auto& [q, docs] : qrels.judgments()) {
        for (const auto& d : docs) out << q << '\t' << d << '\n';
    }
}

}  // namespace dvlab
