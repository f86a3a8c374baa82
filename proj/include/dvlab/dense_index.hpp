#pragma once

// Exact brute-force dense retrieval. Scores are accumulated sequentially in
// double precision, so rankings are bit-stable run to run.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "dvlab/embedding.hpp"
#include "dvlab/ranking.hpp"

namespace dvlab {

/// Euclidean ranks by ascending distance, exposed as descending negated distance.
enum class SimilarityKind { cosine, dot, euclidean };

std::string_view to_string(SimilarityKind kind) noexcept;
SimilarityKind parse_similarity(std::string_view name);

class DenseIndex {
public:
    /// Cosine indexes normalise rows at build time and reject zero rows.
    static DenseIndex build(EmbeddingMatrix vectors, SimilarityKind kind);

    /// Exact top-k over the first `row_limit` rows (all rows by default).
    /// Throws DomainError on dimension mismatch or a zero query under cosine.
    RankedResult search(const QueryVector& q, std::size_t top_k,
                        std::optional<std::size_t> row_limit = std::nullopt) const;

    /// 1-based position of `doc_id` in the full ordering; Rank::beyond() when
    /// it exceeds `cutoff`. Throws DomainError for unknown ids.
    Rank rank_of(const QueryVector& q, std::string_view doc_id,
                 std::optional<std::size_t> cutoff = std::nullopt,
                 std::optional<std::size_t> row_limit = std::nullopt) const;

    /// Score of one row for q under the index similarity.
    double score(const QueryVector& q, std::size_t row) const;

    std::size_t size() const noexcept { return vectors_.size(); }
    std::size_t dim() const noexcept { return vectors_.dim(); }
    SimilarityKind kind() const noexcept { return kind_; }
    const EmbeddingMatrix& vectors() const noexcept { return vectors_; }

private:
    DenseIndex(EmbeddingMatrix vectors, SimilarityKind kind)
        : vectors_(std::move(vectors)), kind_(kind) {}

    std::vector<double> prepare_query(const QueryVector& q) const;
    double score_prepared(std::span<const double> q, std::size_t row) const noexcept;
    std::size_t limit(std::optional<std::size_t> row_limit) const;

    EmbeddingMatrix vectors_;
    SimilarityKind kind_;
};

/// Multiplies by a seeded k x target_dim matrix with orthonormal columns
/// (QR of a Gaussian matrix). Rows are re-normalised when `renormalize`.
/// Throws DomainError unless target_dim < k.
EmbeddingMatrix project(const EmbeddingMatrix& matrix, Dimension target_dim, std::uint64_t seed,
                        bool renormalize = true);

/// Maps rows v to (v, sqrt(M^2 - |v|^2)) / M with M the largest row norm, so
/// dot-product ranking in k dims becomes cosine ranking in k+1 dims.
/// Throws DomainError for an all-zero matrix.
EmbeddingMatrix lift_to_unit_sphere(const EmbeddingMatrix& matrix);

/// Query side of the lift: (q, 0) / |q|.
QueryVector lift_query(const QueryVector& q);

}  // namespace dvlab
