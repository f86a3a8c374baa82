#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dvlab {

/// Vector dimensionality, k >= 2.
class Dimension {
public:
    explicit Dimension(std::size_t k);
    std::size_t value() const noexcept { return k_; }
    operator std::size_t() const noexcept { return k_; }

private:
    std::size_t k_;
};

/// Row-major count x k matrix of finite doubles with unique string ids.
class EmbeddingMatrix {
public:
    explicit EmbeddingMatrix(Dimension k);
    /// Throws DomainError on duplicate ids, size mismatch or non-finite values.
    EmbeddingMatrix(Dimension k, std::vector<std::string> ids, std::vector<double> values);

    void append(std::string id, std::span<const double> row);
    void reserve(std::size_t rows);

    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    std::size_t dim() const noexcept { return k_; }
    Dimension dimension() const { return Dimension(k_); }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * k_, k_};
    }
    std::span<double> mutable_row(std::size_t i) noexcept { return {values_.data() + i * k_, k_}; }
    const std::string& id(std::size_t i) const noexcept { return ids_[i]; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::optional<std::size_t> find(std::string_view id) const;

private:
    std::size_t k_;
    std::vector<std::string> ids_;
    std::vector<double> values_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

struct QueryVector {
    std::string id;
    std::vector<double> values;
};

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm(std::span<const double> a) noexcept;

}  // namespace dvlab
