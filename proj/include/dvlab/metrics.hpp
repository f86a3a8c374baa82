#pragma once

// Evaluation over materialized rankings: MRR@k, the rank-aware error rate
// Err = mean(1 - 1/rank) = 1 - MRR, relative error rates, and the share of
// queries where injected noise outranks every relevant document.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "dvlab/ranking.hpp"

namespace dvlab {

/// query id -> non-empty set of relevant doc ids
class Qrels {
public:
    void add(const std::string& query_id, const std::string& doc_id);
    const std::set<std::string>& relevant(const std::string& query_id) const;
    bool contains(const std::string& query_id) const { return judgments_.count(query_id) != 0; }
    std::size_t size() const noexcept { return judgments_.size(); }
    bool empty() const noexcept { return judgments_.empty(); }
    const std::map<std::string, std::set<std::string>>& judgments() const noexcept { return judgments_; }
    /// Union of all relevant ids.
    std::set<std::string> all_relevant() const;

private:
    std::map<std::string, std::set<std::string>> judgments_;
};

/// Per query: rank of the best-ranked relevant document, or beyond.
using RankAssignment = std::map<std::string, Rank>;
using ResultSet = std::map<std::string, RankedResult>;

/// Throws DomainError when a judged query has no result row. Result rows for
/// unjudged queries are ignored.
RankAssignment ranks_from_results(const ResultSet& results, const Qrels& qrels, std::size_t cutoff);

/// Mean reciprocal rank, 1/beyond = 0. Throws DomainError when empty.
double mrr(const RankAssignment& ranks);

/// 1 - mrr(ranks). Throws DomainError when empty.
double error_rate(const RankAssignment& ranks);

/// 100 * err_dense / err_sparse. Throws DomainError when err_sparse == 0.
double relative_error_rate(double err_dense, double err_sparse);

/// Percentage of judged queries whose ranking places some noise document
/// strictly above (by score) every relevant one, or contains noise while no
/// relevant document was retrieved. Throws DomainError when noise and
/// relevant ids overlap or a judged query has no result row.
double noise_defeat_rate(const ResultSet& results, const Qrels& qrels,
                         const std::unordered_set<std::string>& noise_ids);

}  // namespace dvlab
