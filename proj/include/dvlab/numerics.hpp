#pragma once

// Geometric false-positive model for nearest-neighbour retrieval on the unit
// hypersphere: regularized incomplete beta, spherical cap fractions, the
// single-distractor and compound false-positive probabilities, plus Monte
// Carlo oracles.

#include <compare>
#include <cstddef>
#include <cstdint>

#include "dvlab/embedding.hpp"
#include "dvlab/parallel.hpp"
#include "dvlab/random.hpp"

namespace dvlab {

/// A probability carried as a pair of logarithms, log(p) and log(1 - p), so
/// values far below the double range near 0 (caps in high dimension) or
/// complements far below it near 1 (saturated compound probabilities) stay
/// ordered exactly.
class Probability {
public:
    /// Throws DomainError unless 0 <= p <= 1.
    explicit Probability(double p);

    static Probability zero() noexcept;
    static Probability one() noexcept;
    /// From log(p), log(p) <= 0.
    static Probability from_log(double log_p);
    /// From log(1 - p), log(1 - p) <= 0.
    static Probability from_log_complement(double log_q);

    double value() const noexcept { return value_; }
    double log() const noexcept { return log_p_; }
    double log_complement() const noexcept { return log_q_; }
    Probability complement() const noexcept;

    std::partial_ordering operator<=>(const Probability& other) const noexcept;
    bool operator==(const Probability& other) const noexcept {
        return (*this <=> other) == std::partial_ordering::equivalent;
    }

private:
    Probability(double value, double log_p, double log_q) noexcept
        : value_(value), log_p_(log_p), log_q_(log_q) {}

    double value_;
    double log_p_;
    double log_q_;
};

/// Angle in radians on [0, pi].
class PolarAngle {
public:
    explicit PolarAngle(double theta);
    /// theta = arccos(s), s in [-1, 1].
    static PolarAngle from_cosine(double s);

    double radians() const noexcept { return theta_; }
    double cosine() const noexcept;

private:
    double theta_;
};

struct FalsePositiveModel {
    Dimension k;
    PolarAngle theta;
    std::uint64_t n;  ///< index size, relevant document included

    FalsePositiveModel(Dimension k, PolarAngle theta, std::uint64_t n);

    Probability single() const;
    Probability compound() const;
};

/// Regularized incomplete beta I_x(a, b). Continued fraction (modified Lentz)
/// with the symmetry flip I_x(a,b) = 1 - I_{1-x}(b,a) for x > (a+1)/(a+b+2).
/// Throws DomainError on x outside [0,1] or a, b <= 0, ConvergenceError if the
/// fraction has not converged after 500 iterations.
double reg_inc_beta(double x, double a, double b);

/// log I_x(a, b), accurate where I_x itself underflows.
double log_reg_inc_beta(double x, double a, double b);

/// Fraction of the unit (k-1)-sphere in R^k within angle theta of a pole.
/// For theta <= pi/2 this is I_{sin^2 theta}((k-1)/2, 1/2) / 2; larger
/// angles use the complement of the opposite cap.
Probability cap_fraction(PolarAngle theta, Dimension k);

/// d/dtheta cap_fraction, i.e. sin^{k-2}(theta) / B((k-1)/2, 1/2), in log form.
double log_cap_density(double theta, Dimension k);

/// Probability that one uniformly random unit vector beats a relevant
/// document at cosine similarity cossim_qr to the query.
Probability single_false_positive_prob(double cossim_qr, Dimension k);

/// 1 - (1 - p)^(n-1): chance that at least one of the n-1 independent
/// distractors of an index of size n beats the relevant document.
Probability compound_false_positive_prob(Probability p_single, std::uint64_t n);

struct MonteCarloEstimate {
    double estimate;
    double stderr_;  ///< binomial standard error sqrt(p(1-p)/trials) of the estimate
    std::uint64_t hits;
    std::uint64_t trials;
};

/// Monte Carlo cap fraction: share of `trials` uniform unit vectors whose
/// angle to e_1 is <= theta. Trials are drawn in fixed-size blocks with one
/// random stream per block, so the result depends only on the seed.
MonteCarloEstimate mc_cap_fraction(PolarAngle theta, Dimension k, std::uint64_t trials,
                                   std::uint64_t seed, unsigned threads = default_threads());

/// Unit vectors from normalized standard-normal coordinates; row i depends
/// only on (seed, i). Row ids are "u-<i>".
EmbeddingMatrix sample_uniform_sphere(Dimension k, std::size_t count, std::uint64_t seed);

/// Fills `out` (size k) with a uniform unit vector drawn from `normal`.
void draw_unit_vector(NormalSampler& normal, std::span<double> out);

}  // namespace dvlab
