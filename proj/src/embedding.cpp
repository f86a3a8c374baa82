#include "dvlab/embedding.hpp"

#include <cmath>
#include <string>

#include "dvlab/errors.hpp"

namespace dvlab {

Dimension::Dimension(std::size_t k) : k_(k) {
    if (k < 2) throw DomainError("dimension must be at least 2, got " + std::to_string(k));
}

EmbeddingMatrix::EmbeddingMatrix(Dimension k) : k_(k.value()) {}

EmbeddingMatrix::EmbeddingMatrix(Dimension k, std::vector<std::string> ids, std::vector<double> values)
    : k_(k.value()) {
    if (values.size() != ids.size() * k_) {
        throw DomainError("embedding matrix: " + std::to_string(ids.size()) + " ids but " +
                          std::to_string(values.size()) + " values for dimension " +
                          std::to_string(k_));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("embedding matrix: non-finite value");
    }
    lookup_.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!lookup_.emplace(ids[i], i).second) {
            throw DomainError("embedding matrix: duplicate id '" + ids[i] + "'");
        }
    }
    ids_ = std::move(ids);
    values_ = std::move(values);
}

void EmbeddingMatrix::append(std::string id, std::span<const double> row) {
    if (row.size() != k_) {
        throw DomainError("embedding matrix: row '" + id + "' has dimension " +
                          std::to_string(row.size()) + ", expected " + std::to_string(k_));
    }
    for (double v : row) {
        if (!std::isfinite(v)) throw DomainError("embedding matrix: non-finite value in '" + id + "'");
    }
    if (!lookup_.emplace(id, ids_.size()).second) {
        throw DomainError("embedding matrix: duplicate id '" + id + "'");
    }
    ids_.push_back(std::move(id));
    values_.insert(values_.end(), row.begin(), row.end());
}

void EmbeddingMatrix::reserve(std::size_t rows) {
    ids_.reserve(rows);
    values_.reserve(rows * k_);
    lookup_.reserve(rows);
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
    auto it = lookup_.find(std::string(id));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

}  // namespace dvlab
