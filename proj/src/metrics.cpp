#include "dvlab/metrics.hpp"

#include "dvlab/errors.hpp"

namespace dvlab {

void Qrels::add(const std::string& query_id, const std::string& doc_id) {
    if (query_id.empty() || doc_id.empty()) throw DomainError("qrels ids must be non-empty");
    judgments_[query_id].insert(doc_id);
}

const std::set<std::string>& Qrels::relevant(const std::string& query_id) const {
    auto it = judgments_.find(query_id);
    if (it == judgments_.end()) throw DomainError("query '" + query_id + "' has no relevance judgments");
    return it->second;
}

std::set<std::string> Qrels::all_relevant() const {
    std::set<std::string> out;
    for (const auto& [q, docs] : judgments_) out.insert(docs.begin(), docs.end());
    return out;
}

namespace {

const RankedResult& result_for(const ResultSet& results, const std::string& query_id) {
    auto it = results.find(query_id);
    if (it == results.end()) throw DomainError("no results for judged query '" + query_id + "'");
    return it->second;
}

}  // namespace

RankAssignment ranks_from_results(const ResultSet& results, const Qrels& qrels, std::size_t cutoff) {
    if (cutoff == 0) throw DomainError("cutoff must be positive");
    RankAssignment ranks;
    for (const auto& [query_id, relevant] : qrels.judgments()) {
        const auto& result = result_for(results, query_id);
        Rank rank = Rank::beyond();
        const std::size_t window = std::min(cutoff, result.entries.size());
        for (std::size_t i = 0; i < window; ++i) {
            if (relevant.count(result.entries[i].doc_id)) {
                rank = Rank::at(i + 1);
                break;
            }
        }
        ranks.emplace(query_id, rank);
    }
    return ranks;
}

double mrr(const RankAssignment& ranks) {
    if (ranks.empty()) throw DomainError("MRR of an empty rank assignment");
    // Summed per distinct position so the result does not depend on query order.
    std::map<std::size_t, std::size_t> counts;
    for (const auto& [q, r] : ranks) {
        if (r.finite()) ++counts[r.position()];
    }
    double sum = 0.0;
    for (const auto& [pos, n] : counts) sum += static_cast<double>(n) / static_cast<double>(pos);
    return sum / static_cast<double>(ranks.size());
}

double error_rate(const RankAssignment& ranks) { return 1.0 - mrr(ranks); }

double relative_error_rate(double err_dense, double err_sparse) {
    if (err_sparse == 0.0) throw DomainError("relative error rate undefined: sparse error rate is zero");
    return 100.0 * err_dense / err_sparse;
}

double noise_defeat_rate(const ResultSet& results, const Qrels& qrels,
                         const std::unordered_set<std::string>& noise_ids) {
    if (qrels.empty()) throw DomainError("noise defeat rate needs at least one judged query");
    for (const auto& [q, relevant] : qrels.judgments()) {
        for (const auto& d : relevant) {
            if (noise_ids.count(d)) throw DomainError("document '" + d + "' is both noise and relevant");
        }
    }
    std::size_t defeated = 0;
    for (const auto& [query_id, relevant] : qrels.judgments()) {
        const auto& result = result_for(results, query_id);
        const ScoredDoc* best_noise = nullptr;
        const ScoredDoc* best_relevant = nullptr;
        for (const auto& e : result.entries) {
            if (!best_noise && noise_ids.count(e.doc_id)) best_noise = &e;
            if (!best_relevant && relevant.count(e.doc_id)) best_relevant = &e;
            if (best_noise && best_relevant) break;
        }
        if (!best_noise) continue;
        if (!best_relevant || best_noise->score > best_relevant->score) ++defeated;
    }
    return 100.0 * static_cast<double>(defeated) / static_cast<double>(qrels.size());
}

}  // namespace dvlab
