#include "dvlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dvlab/errors.hpp"
#include "dvlab/random.hpp"

namespace dvlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = std::numbers::ln2;
constexpr int kMaxIterations = 500;
constexpr double kConvergence = 1e-15;
constexpr double kTiny = 1e-300;

double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);  // reentrant; std::lgamma writes signgam
#else
    return std::lgamma(x);
#endif
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

// Continued fraction for I_x(a,b) by the modified Lentz method; valid (fast
// converging) for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kConvergence) return h;
    }
    throw ConvergenceError("incomplete beta continued fraction did not converge for x=" +
                           std::to_string(x) + ", a=" + std::to_string(a) +
                           ", b=" + std::to_string(b));
}

// log of x^a (1-x)^b / (a B(a,b)) * CF, the unflipped expansion.
double log_beta_series(double x, double a, double b) {
    const double front = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b) - std::log(a);
    return front + std::log(beta_continued_fraction(x, a, b));
}

void check_beta_domain(double x, double a, double b) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("incomplete beta: x must lie in [0,1], got " + std::to_string(x));
    }
    if (!(a > 0.0) || !(b > 0.0) || std::isinf(a) || std::isinf(b)) {
        throw DomainError("incomplete beta: a and b must be positive and finite");
    }
}

bool use_flip(double x, double a, double b) { return x > (a + 1.0) / (a + b + 2.0); }

// Half of I_x((k-1)/2, 1/2) for x = sin^2(theta), theta <= pi/2.
Probability half_cap(double sin2, Dimension k) {
    const double a = 0.5 * static_cast<double>(k.value() - 1);
    const double i = reg_inc_beta(sin2, a, 0.5);
    if (i > 1e-290) return Probability(0.5 * i);
    if (sin2 == 0.0) return Probability::zero();
    return Probability::from_log(-kLn2 + log_reg_inc_beta(sin2, a, 0.5));
}

}  // namespace

// ---------------------------------------------------------------------------
// Probability

Probability::Probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("probability must lie in [0,1], got " + std::to_string(p));
    }
    value_ = p;
    log_p_ = std::log(p);
    log_q_ = std::log1p(-p);
}

Probability Probability::zero() noexcept { return Probability(0.0, -kInf, 0.0); }
Probability Probability::one() noexcept { return Probability(1.0, 0.0, -kInf); }

Probability Probability::from_log(double log_p) {
    if (std::isnan(log_p) || log_p > 0.0) throw DomainError("log-probability must be <= 0");
    const double value = std::exp(log_p);
    const double log_q = log_p > -kLn2 ? std::log(-std::expm1(log_p)) : std::log1p(-value);
    return Probability(value, log_p, log_q);
}

Probability Probability::from_log_complement(double log_q) {
    return from_log(log_q).complement();
}

Probability Probability::complement() const noexcept {
    return Probability(std::exp(log_q_), log_q_, log_p_);
}

std::partial_ordering Probability::operator<=>(const Probability& other) const noexcept {
    const bool low = log_p_ <= -kLn2;
    const bool other_low = other.log_p_ <= -kLn2;
    if (low != other_low) return low ? std::partial_ordering::less : std::partial_ordering::greater;
    if (low) return log_p_ <=> other.log_p_;
    return other.log_q_ <=> log_q_;
}

// ---------------------------------------------------------------------------
// PolarAngle / FalsePositiveModel

PolarAngle::PolarAngle(double theta) : theta_(theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw DomainError("polar angle must lie in [0, pi], got " + std::to_string(theta));
    }
}

PolarAngle PolarAngle::from_cosine(double s) {
    if (!(s >= -1.0 && s <= 1.0)) {
        throw DomainError("cosine similarity must lie in [-1,1], got " + std::to_string(s));
    }
    return PolarAngle(std::acos(s));
}

double PolarAngle::cosine() const noexcept { return std::cos(theta_); }

FalsePositiveModel::FalsePositiveModel(Dimension k_, PolarAngle theta_, std::uint64_t n_)
    : k(k_), theta(theta_), n(n_) {
    if (n < 1) throw DomainError("index size must be at least 1");
}

Probability FalsePositiveModel::single() const { return cap_fraction(theta, k); }

Probability FalsePositiveModel::compound() const {
    return compound_false_positive_prob(single(), n);
}

// ---------------------------------------------------------------------------
// Special functions

double reg_inc_beta(double x, double a, double b) {
    check_beta_domain(x, a, b);
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double result;
    if (use_flip(x, a, b)) {
        result = -std::expm1(log_beta_series(1.0 - x, b, a));
    } else {
        result = std::exp(log_beta_series(x, a, b));
    }
    return std::clamp(result, 0.0, 1.0);
}

double log_reg_inc_beta(double x, double a, double b) {
    check_beta_domain(x, a, b);
    if (x == 0.0) return -kInf;
    if (x == 1.0) return 0.0;
    if (use_flip(x, a, b)) {
        const double log_other = log_beta_series(1.0 - x, b, a);
        return std::min(0.0, std::log(-std::expm1(log_other)));
    }
    return std::min(0.0, log_beta_series(x, a, b));
}

Probability cap_fraction(PolarAngle theta, Dimension k) {
    const double t = theta.radians();
    if (t <= std::numbers::pi / 2) {
        const double s = std::sin(t);
        return half_cap(s * s, k);
    }
    return cap_fraction(PolarAngle(std::numbers::pi - t), k).complement();
}

double log_cap_density(double theta, Dimension k) {
    const double a = 0.5 * static_cast<double>(k.value() - 1);
    if (k.value() == 2) return -log_beta(a, 0.5);
    return static_cast<double>(k.value() - 2) * std::log(std::sin(theta)) - log_beta(a, 0.5);
}

Probability single_false_positive_prob(double cossim_qr, Dimension k) {
    if (!(cossim_qr >= -1.0 && cossim_qr <= 1.0)) {
        throw DomainError("cosine similarity must lie in [-1,1], got " + std::to_string(cossim_qr));
    }
    // sin^2 = (1-c)(1+c) keeps precision near c = +-1
    const double c = std::fabs(cossim_qr);
    const Probability near_cap = half_cap((1.0 - c) * (1.0 + c), k);
    return cossim_qr >= 0.0 ? near_cap : near_cap.complement();
}

Probability compound_false_positive_prob(Probability p_single, std::uint64_t n) {
    if (n <= 1 || p_single.log() == -kInf) return Probability::zero();
    if (p_single.log_complement() == -kInf) return Probability::one();
    const double m = static_cast<double>(n - 1);
    const double log_mp = p_single.log() + std::log(m);
    if (log_mp < std::log(1e-8)) {
        // 1-(1-p)^m = m p (1 - (m-1) p / 2 + O((mp)^2))
        const double half_rest = m > 1.0 ? 0.5 * std::exp(p_single.log() + std::log(m - 1.0)) : 0.0;
        return Probability::from_log(log_mp + std::log1p(-half_rest));
    }
    return Probability::from_log_complement(m * p_single.log_complement());
}

// ---------------------------------------------------------------------------
// Sampling

void draw_unit_vector(NormalSampler& normal, std::span<double> out) {
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (double& v : out) {
            v = normal();
            n2 += v * v;
        }
    } while (n2 == 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (double& v : out) v *= inv;
}

MonteCarloEstimate mc_cap_fraction(PolarAngle theta, Dimension k, std::uint64_t trials,
                                   std::uint64_t seed, unsigned threads) {
    if (trials == 0) throw DomainError("Monte Carlo needs at least one trial");
    constexpr std::uint64_t kBlock = 1u << 14;
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
    const double c = theta.cosine();
    const std::size_t dim = k.value();
    std::vector<std::uint64_t> hits(blocks, 0);
    parallel_for(blocks, threads, [&](std::size_t b) {
        NormalSampler normal(SplitMix64(seed, streams::kMonteCarlo, b));
        const std::uint64_t begin = b * kBlock;
        const std::uint64_t end = std::min(trials, begin + kBlock);
        std::uint64_t count = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
            const double first = normal();
            double n2 = first * first;
            for (std::size_t i = 1; i < dim; ++i) {
                const double v = normal();
                n2 += v * v;
            }
            if (n2 > 0.0 && first >= c * std::sqrt(n2)) ++count;
        }
        hits[b] = count;
    });
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    const double p = static_cast<double>(total) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), total, trials};
}

EmbeddingMatrix sample_uniform_sphere(Dimension k, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw DomainError("sample count must be positive");
    std::vector<double> values(count * k.value());
    std::vector<std::string> ids(count);
    for (std::size_t i = 0; i < count; ++i) {
        NormalSampler normal(SplitMix64(seed, streams::kSphere, i));
        draw_unit_vector(normal, {values.data() + i * k.value(), k.value()});
        ids[i] = "u-" + std::to_string(i);
    }
    return EmbeddingMatrix(k, std::move(ids), std::move(values));
}

}  // namespace dvlab
