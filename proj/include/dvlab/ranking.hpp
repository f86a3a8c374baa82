#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dvlab/errors.hpp"

namespace dvlab {

struct ScoredDoc {
    std::string doc_id;
    double score;
};

/// Shared total order: higher score first, ties by ascending doc id.
inline bool ranks_before(double score_a, const std::string& id_a, double score_b,
                         const std::string& id_b) noexcept {
    if (score_a != score_b) return score_a > score_b;
    return id_a < id_b;
}

inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept {
    return ranks_before(a.score, a.doc_id, b.score, b.doc_id);
}

/// Ordered retrieval output for one query.
struct RankedResult {
    std::string query_id;
    std::vector<ScoredDoc> entries;
};

/// 1-based rank, or "beyond" (infinite) when outside a cutoff or not retrieved.
class Rank {
public:
    static Rank at(std::size_t position) {
        if (position == 0) throw DomainError("rank positions are 1-based");
        return Rank(position);
    }
    static constexpr Rank beyond() noexcept { return Rank(); }

    bool finite() const noexcept { return position_ != 0; }
    /// Only meaningful when finite().
    std::size_t position() const noexcept { return position_; }
    double reciprocal() const noexcept { return finite() ? 1.0 / static_cast<double>(position_) : 0.0; }

    bool operator==(const Rank&) const = default;
    /// Finite ranks order by position; beyond sorts last.
    bool operator<(const Rank& other) const noexcept {
        if (!finite()) return false;
        if (!other.finite()) return true;
        return position_ < other.position_;
    }

private:
    constexpr Rank() noexcept = default;
    explicit constexpr Rank(std::size_t p) noexcept : position_(p) {}
    std::size_t position_ = 0;
};

}  // namespace dvlab
