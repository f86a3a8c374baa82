#include "dvlab/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <unordered_set>

#include "dvlab/errors.hpp"

namespace dvlab {

namespace {

bool is_token_byte(unsigned char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_token_byte(c)) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

void Bm25Params::validate() const {
    if (!(k1 >= 0.0) || !std::isfinite(k1)) throw DomainError("BM25 k1 must be >= 0");
    if (!(b >= 0.0 && b <= 1.0)) throw DomainError("BM25 b must lie in [0,1]");
}

Bm25Index Bm25Index::build(std::span<const Document> corpus, Bm25Params params) {
    params.validate();
    Bm25Index index;
    index.params_ = params;
    index.doc_ids_.reserve(corpus.size());
    index.doc_lengths_.reserve(corpus.size());
    index.doc_lookup_.reserve(corpus.size());
    std::uint64_t total_length = 0;
    std::unordered_map<std::string, std::uint32_t> counts;
    for (const auto& doc : corpus) {
        if (doc.id.empty()) throw DomainError("document id must be non-empty");
        const auto ordinal = static_cast<std::uint32_t>(index.doc_ids_.size());
        if (!index.doc_lookup_.emplace(doc.id, ordinal).second) {
            throw DomainError("duplicate document id '" + doc.id + "'");
        }
        index.doc_ids_.push_back(doc.id);
        const auto tokens = tokenize(doc.text);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_length += tokens.size();
        counts.clear();
        for (const auto& t : tokens) ++counts[t];
        for (auto& [term, tf] : counts) index.postings_[term].push_back({ordinal, tf});
    }
    // Postings were appended in ordinal order already.
    if (!index.doc_ids_.empty()) {
        index.avgdl_ = static_cast<double>(total_length) / static_cast<double>(index.doc_ids_.size());
    }
    return index;
}

std::vector<std::string> Bm25Index::query_terms(std::string_view query_text) const {
    std::vector<std::string> unique;
    std::unordered_set<std::string> seen;
    for (auto& t : tokenize(query_text)) {
        if (seen.insert(t).second) unique.push_back(std::move(t));
    }
    return unique;
}

double Bm25Index::idf(std::string_view term) const {
    const double n = static_cast<double>(doc_count());
    const double d = static_cast<double>(df(term));
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::size_t Bm25Index::df(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0 : it->second.size();
}

double Bm25Index::term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const noexcept {
    const double f = static_cast<double>(tf);
    const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len) / avgdl_;
    return idf * f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
}

std::uint32_t Bm25Index::doc_index(std::string_view doc_id) const {
    auto it = doc_lookup_.find(std::string(doc_id));
    if (it == doc_lookup_.end()) throw DomainError("document '" + std::string(doc_id) + "' is not in the index");
    return it->second;
}

std::size_t Bm25Index::doc_length(std::string_view doc_id) const { return doc_lengths_[doc_index(doc_id)]; }

namespace {

// Summing the per-term weights in ascending order makes the score a function
// of the weight multiset, so documents that tie mathematically through
// permuted term weights also tie bit for bit.
double canonical_sum(std::span<double> parts) {
    std::sort(parts.begin(), parts.end());
    double s = 0.0;
    for (double x : parts) s += x;
    return s;
}

}  // namespace

RankedResult Bm25Index::search(std::string_view query_id, std::string_view query_text, std::size_t top_k) const {
    RankedResult result{std::string(query_id), {}};
    if (top_k == 0 || doc_ids_.empty()) return result;
    const auto terms = query_terms(query_text);
    const std::size_t width = terms.size();
    constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> slot(doc_ids_.size(), kUnset);
    std::vector<std::uint32_t> touched;
    std::vector<double> parts;  // width weights per touched doc
    for (std::size_t t = 0; t < width; ++t) {
        auto it = postings_.find(terms[t]);
        if (it == postings_.end()) continue;
        const double w = idf(terms[t]);
        for (const auto& p : it->second) {
            if (slot[p.doc] == kUnset) {
                slot[p.doc] = static_cast<std::uint32_t>(touched.size());
                touched.push_back(p.doc);
                parts.resize(parts.size() + width, 0.0);
            }
            parts[slot[p.doc] * width + t] = term_weight(w, p.tf, doc_lengths_[p.doc]);
        }
    }
    std::vector<double> scores(touched.size());
    for (std::size_t i = 0; i < touched.size(); ++i) {
        scores[i] = canonical_sum(std::span<double>(parts).subspan(i * width, width));
    }
    std::vector<std::uint32_t> order(touched.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        return ranks_before(scores[a], doc_ids_[touched[a]], scores[b], doc_ids_[touched[b]]);
    };
    const std::size_t keep = std::min(top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), better);
    for (std::size_t i = 0; i < keep; ++i) {
        const auto j = order[i];
        if (scores[j] > 0.0) result.entries.push_back({doc_ids_[touched[j]], scores[j]});
    }
    return result;
}

double Bm25Index::score(std::string_view query_text, std::string_view doc_id) const {
    const auto target = doc_index(doc_id);
    std::vector<double> parts;
    for (const auto& term : query_terms(query_text)) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        auto pos = std::lower_bound(it->second.begin(), it->second.end(), target,
                                    [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (pos != it->second.end() && pos->doc == target) {
            parts.push_back(term_weight(idf(term), pos->tf, doc_lengths_[target]));
        }
    }
    return canonical_sum(parts);
}

Rank Bm25Index::rank_of(std::string_view query_text, std::string_view doc_id,
                        std::optional<std::size_t> cutoff) const {
    const auto target = doc_index(doc_id);
    const double target_score = score(query_text, doc_id);
    if (target_score <= 0.0) return Rank::beyond();
    // Every document ranked ahead has a positive score, so the candidate set is
    // the full result list.
    const auto all = search("", query_text, doc_ids_.size());
    std::size_t ahead = 0;
    for (const auto& e : all.entries) {
        if (ranks_before(e.score, e.doc_id, target_score, doc_ids_[target])) ++ahead;
    }
    const std::size_t position = ahead + 1;
    if (cutoff && position > *cutoff) return Rank::beyond();
    return Rank::at(position);
}

}  // namespace dvlab
