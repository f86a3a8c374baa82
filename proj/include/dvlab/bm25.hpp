#pragma once

// Okapi BM25 over an in-memory inverted index.
//
//   score(q, d) = sum over distinct query terms t of
//       idf(t) * tf(t,d) * (k1 + 1) / (tf(t,d) + k1 * (1 - b + b * |d| / avgdl))
//   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
//
// Documents with zero score are never returned.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dvlab/ranking.hpp"

namespace dvlab {

struct Document {
    std::string id;
    std::string text;
};

/// Lowercases ASCII and splits on every byte that is not an ASCII letter or
/// digit. Bytes >= 0x80 (UTF-8 sequences) are kept inside tokens.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    /// Throws DomainError unless k1 >= 0 and 0 <= b <= 1.
    void validate() const;
};

class Bm25Index {
public:
    /// Throws DomainError on duplicate or empty document ids. An empty corpus
    /// yields an index whose searches return nothing.
    static Bm25Index build(std::span<const Document> corpus, Bm25Params params = {});

    RankedResult search(std::string_view query_id, std::string_view query_text, std::size_t top_k) const;

    /// BM25 score of one document; 0 when no query term matches.
    double score(std::string_view query_text, std::string_view doc_id) const;

    /// Position of doc_id in the full ranking. Zero-score documents are not
    /// retrievable and rank beyond; so do positions past `cutoff`.
    Rank rank_of(std::string_view query_text, std::string_view doc_id,
                 std::optional<std::size_t> cutoff = std::nullopt) const;

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avgdl() const noexcept { return avgdl_; }
    std::size_t df(std::string_view term) const;
    double idf(std::string_view term) const;
    std::size_t doc_length(std::string_view doc_id) const;
    const Bm25Params& params() const noexcept { return params_; }

private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    Bm25Index() = default;

    std::vector<std::string> query_terms(std::string_view query_text) const;
    double term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const noexcept;
    std::uint32_t doc_index(std::string_view doc_id) const;

    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::uint32_t> doc_lookup_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;  // sorted by doc ordinal
    double avgdl_ = 0.0;
};

}  // namespace dvlab
