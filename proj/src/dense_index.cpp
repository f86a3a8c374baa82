#include "dvlab/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dvlab/errors.hpp"
#include "dvlab/random.hpp"

namespace dvlab {

std::string_view to_string(SimilarityKind kind) noexcept {
    switch (kind) {
        case SimilarityKind::cosine: return "cosine";
        case SimilarityKind::dot: return "dot";
        case SimilarityKind::euclidean: return "euclidean";
    }
    return "cosine";
}

SimilarityKind parse_similarity(std::string_view name) {
    if (name == "cosine") return SimilarityKind::cosine;
    if (name == "dot") return SimilarityKind::dot;
    if (name == "euclidean") return SimilarityKind::euclidean;
    throw DomainError("unknown similarity '" + std::string(name) + "'");
}

DenseIndex DenseIndex::build(EmbeddingMatrix vectors, SimilarityKind kind) {
    if (kind == SimilarityKind::cosine) {
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            auto row = vectors.mutable_row(i);
            const double n = norm(row);
            if (n == 0.0) {
                throw DomainError("cannot normalise zero vector '" + vectors.id(i) + "' for cosine");
            }
            for (double& v : row) v /= n;
        }
    }
    return DenseIndex(std::move(vectors), kind);
}

std::vector<double> DenseIndex::prepare_query(const QueryVector& q) const {
    if (q.values.size() != dim()) {
        throw DomainError("query '" + q.id + "' has dimension " + std::to_string(q.values.size()) +
                          ", index has " + std::to_string(dim()));
    }
    std::vector<double> out = q.values;
    for (double v : out) {
        if (!std::isfinite(v)) throw DomainError("query '" + q.id + "' has non-finite entries");
    }
    if (kind_ == SimilarityKind::cosine) {
        const double n = norm(out);
        if (n == 0.0) throw DomainError("zero query vector '" + q.id + "' under cosine");
        for (double& v : out) v /= n;
    }
    return out;
}

double DenseIndex::score_prepared(std::span<const double> q, std::size_t row) const noexcept {
    const auto d = vectors_.row(row);
    if (kind_ == SimilarityKind::euclidean) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double diff = q[i] - d[i];
            s += diff * diff;
        }
        return -std::sqrt(s);
    }
    return dot(q, d);
}

std::size_t DenseIndex::limit(std::optional<std::size_t> row_limit) const {
    if (!row_limit) return size();
    if (*row_limit > size()) {
        throw DomainError("row limit " + std::to_string(*row_limit) + " exceeds index size " +
                          std::to_string(size()));
    }
    return *row_limit;
}

double DenseIndex::score(const QueryVector& q, std::size_t row) const {
    const auto prepared = prepare_query(q);
    return score_prepared(prepared, row);
}

namespace {

// Scores four rows at once. Each accumulator runs over coordinates in order,
// giving exactly the same bits as the one-row loop.
void dot4(const double* q, const double* d0, std::size_t k, double out[4]) noexcept {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const double* d1 = d0 + k;
    const double* d2 = d1 + k;
    const double* d3 = d2 + k;
    for (std::size_t i = 0; i < k; ++i) {
        s0 += q[i] * d0[i];
        s1 += q[i] * d1[i];
        s2 += q[i] * d2[i];
        s3 += q[i] * d3[i];
    }
    out[0] = s0;
    out[1] = s1;
    out[2] = s2;
    out[3] = s3;
}

}  // namespace

RankedResult DenseIndex::search(const QueryVector& q, std::size_t top_k,
                                std::optional<std::size_t> row_limit) const {
    const auto prepared = prepare_query(q);
    const std::size_t rows = limit(row_limit);
    RankedResult result{q.id, {}};
    if (top_k == 0 || rows == 0) return result;

    struct Candidate {
        double score;
        std::size_t row;
    };
    const auto& ids = vectors_.ids();
    // Heap top is the worst kept candidate.
    auto better = [&ids](const Candidate& a, const Candidate& b) {
        return ranks_before(a.score, ids[a.row], b.score, ids[b.row]);
    };
    std::vector<Candidate> heap;
    heap.reserve(std::min(top_k, rows) + 1);
    auto offer = [&](double s, std::size_t row) {
        if (heap.size() < top_k) {
            heap.push_back({s, row});
            std::push_heap(heap.begin(), heap.end(), better);
        } else if (better({s, row}, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), better);
            heap.back() = {s, row};
            std::push_heap(heap.begin(), heap.end(), better);
        }
    };

    std::size_t row = 0;
    if (kind_ != SimilarityKind::euclidean) {
        const std::size_t k = dim();
        const double* base = vectors_.values().data();
        double block[4];
        for (; row + 4 <= rows; row += 4) {
            dot4(prepared.data(), base + row * k, k, block);
            for (std::size_t j = 0; j < 4; ++j) offer(block[j], row + j);
        }
    }
    for (; row < rows; ++row) offer(score_prepared(prepared, row), row);

    std::sort_heap(heap.begin(), heap.end(), better);
    result.entries.reserve(heap.size());
    for (const auto& c : heap) result.entries.push_back({ids[c.row], c.score});
    return result;
}

Rank DenseIndex::rank_of(const QueryVector& q, std::string_view doc_id,
                         std::optional<std::size_t> cutoff,
                         std::optional<std::size_t> row_limit) const {
    const std::size_t rows = limit(row_limit);
    const auto target = vectors_.find(doc_id);
    if (!target || *target >= rows) {
        throw DomainError("document '" + std::string(doc_id) + "' is not in the index");
    }
    const auto prepared = prepare_query(q);
    const double target_score = score_prepared(prepared, *target);
    const auto& target_id = vectors_.id(*target);
    std::size_t ahead = 0;
    for (std::size_t row = 0; row < rows; ++row) {
        if (row == *target) continue;
        if (ranks_before(score_prepared(prepared, row), vectors_.id(row), target_score, target_id)) ++ahead;
    }
    const std::size_t position = ahead + 1;
    if (cutoff && position > *cutoff) return Rank::beyond();
    return Rank::at(position);
}

EmbeddingMatrix project(const EmbeddingMatrix& matrix, Dimension target_dim, std::uint64_t seed,
                        bool renormalize) {
    const std::size_t k = matrix.dim();
    const std::size_t t = target_dim.value();
    if (t >= k) {
        throw DomainError("projection target " + std::to_string(t) + " must be below source dimension " +
                          std::to_string(k));
    }
    Eigen::MatrixXd gaussian(k, t);
    for (std::size_t i = 0; i < k; ++i) {
        NormalSampler normal(SplitMix64(seed, streams::kProjection, i));
        for (std::size_t j = 0; j < t; ++j) gaussian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = normal();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
    const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));

    EmbeddingMatrix out(target_dim);
    out.reserve(matrix.size());
    std::vector<double> row(t);
    for (std::size_t r = 0; r < matrix.size(); ++r) {
        const auto src = matrix.row(r);
        for (std::size_t j = 0; j < t; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) s += src[i] * basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            row[j] = s;
        }
        if (renormalize) {
            const double n = norm(row);
            if (n > 0.0) {
                for (double& v : row) v /= n;
            }
        }
        out.append(matrix.id(r), row);
    }
    return out;
}

EmbeddingMatrix lift_to_unit_sphere(const EmbeddingMatrix& matrix) {
    double max_norm = 0.0;
    for (std::size_t i = 0; i < matrix.size(); ++i) max_norm = std::max(max_norm, norm(matrix.row(i)));
    if (max_norm == 0.0) throw DomainError("cannot lift an all-zero matrix");
    const std::size_t k = matrix.dim();
    EmbeddingMatrix out(Dimension(k + 1));
    out.reserve(matrix.size());
    std::vector<double> row(k + 1);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        const auto src = matrix.row(i);
        const double n2 = dot(src, src);
        for (std::size_t j = 0; j < k; ++j) row[j] = src[j] / max_norm;
        row[k] = std::sqrt(std::max(0.0, max_norm * max_norm - n2)) / max_norm;
        out.append(matrix.id(i), row);
    }
    return out;
}

QueryVector lift_query(const QueryVector& q) {
    const double n = norm(q.values);
    if (n == 0.0 || !std::isfinite(n)) throw DomainError("cannot lift zero or non-finite query '" + q.id + "'");
    QueryVector out{q.id, {}};
    out.values.reserve(q.values.size() + 1);
    for (double v : q.values) out.values.push_back(v / n);
    out.values.push_back(0.0);
    return out;
}

}  // namespace dvlab
