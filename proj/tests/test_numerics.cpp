#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dvlab/errors.hpp"
#include "dvlab/numerics.hpp"
#include "oracles.hpp"

namespace dvlab {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(RegIncBeta, Examples) {
    EXPECT_DOUBLE_EQ(reg_inc_beta(1.0, 3.5, 0.5), 1.0);
    EXPECT_NEAR(reg_inc_beta(0.5, 0.5, 0.5), 0.5, 1e-12);
    // I_x(1,b) = 1 - (1-x)^b
    EXPECT_NEAR(reg_inc_beta(0.75, 1.0, 0.5), 0.5, 1e-12);
    EXPECT_EQ(reg_inc_beta(0.0, 2.0, 3.0), 0.0);
}

TEST(RegIncBeta, DomainErrors) {
    EXPECT_THROW(reg_inc_beta(-0.1, 1.0, 1.0), DomainError);
    EXPECT_THROW(reg_inc_beta(1.1, 1.0, 1.0), DomainError);
    EXPECT_THROW(reg_inc_beta(0.5, 0.0, 1.0), DomainError);
    EXPECT_THROW(reg_inc_beta(0.5, 1.0, -2.0), DomainError);
    EXPECT_THROW(reg_inc_beta(std::nan(""), 1.0, 1.0), DomainError);
}

TEST(RegIncBeta, ClosedForms) {
    // I_x(a,1) = x^a; I_x(1,b) = 1-(1-x)^b
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.999}) {
        for (double p : {0.5, 1.0, 2.5, 40.0}) {
            EXPECT_NEAR(reg_inc_beta(x, p, 1.0), std::pow(x, p), 1e-13) << x << " " << p;
            EXPECT_NEAR(reg_inc_beta(x, 1.0, p), 1.0 - std::pow(1.0 - x, p), 1e-13) << x << " " << p;
        }
    }
}

TEST(RegIncBeta, ReflectionAndEndpoints) {
    const std::vector<double> params = {0.5, 1.0, 1.5, 3.0, 7.5, 63.5, 383.5};
    for (double a : params) {
        for (double b : params) {
            EXPECT_EQ(reg_inc_beta(0.0, a, b), 0.0);
            EXPECT_EQ(reg_inc_beta(1.0, a, b), 1.0);
            for (double x : {0.001, 0.05, 0.3, 0.5, 0.62, 0.9, 0.999}) {
                EXPECT_NEAR(reg_inc_beta(x, a, b) + reg_inc_beta(1.0 - x, b, a), 1.0, 1e-10)
                    << x << " " << a << " " << b;
            }
        }
    }
}

TEST(RegIncBeta, MonotoneInX) {
    for (double a : {0.5, 4.0, 63.5}) {
        for (double b : {0.5, 2.0, 100.0}) {
            double prev = 0.0;
            for (int i = 0; i <= 400; ++i) {
                const double v = reg_inc_beta(i / 400.0, a, b);
                EXPECT_GE(v, prev - 1e-15);
                prev = v;
            }
        }
    }
}

TEST(RegIncBeta, MatchesQuadratureOracle) {
    for (double a : {0.5, 2.0, 10.5, 200.0}) {
        for (double b : {0.5, 1.5, 30.0}) {
            for (double x : {0.02, 0.4, 0.85, 0.995}) {
                EXPECT_NEAR(reg_inc_beta(x, a, b), oracle::incomplete_beta_quadrature(x, a, b), 1e-11)
                    << x << " " << a << " " << b;
            }
        }
    }
}

TEST(RegIncBeta, LogFormTracksDeepTail) {
    // I_x(a,1) = x^a: log form must stay exact far below double range.
    EXPECT_NEAR(log_reg_inc_beta(0.01, 400.0, 1.0), 400.0 * std::log(0.01), 1e-9);
    EXPECT_EQ(reg_inc_beta(0.01, 400.0, 1.0), 0.0);
    EXPECT_NEAR(log_reg_inc_beta(0.3, 2.0, 5.0), std::log(reg_inc_beta(0.3, 2.0, 5.0)), 1e-13);
}

TEST(Probability, RejectsOutOfRange) {
    EXPECT_THROW(Probability(-1e-9), DomainError);
    EXPECT_THROW(Probability(1.0 + 1e-9), DomainError);
    EXPECT_THROW(Probability(std::nan("")), DomainError);
    EXPECT_NO_THROW(Probability(0.0));
    EXPECT_NO_THROW(Probability(1.0));
}

TEST(Probability, OrdersBeyondDoubleRange) {
    const auto a = Probability::from_log(-2000.0);
    const auto b = Probability::from_log(-1500.0);
    EXPECT_EQ(a.value(), 0.0);
    EXPECT_LT(a, b);
    const auto near_one = Probability::from_log_complement(-900.0);
    const auto nearer_one = Probability::from_log_complement(-1000.0);
    EXPECT_EQ(near_one.value(), 1.0);
    EXPECT_LT(near_one, nearer_one);
    EXPECT_LT(b, near_one);
    EXPECT_LT(Probability(0.3), Probability(0.7));
    EXPECT_NEAR(Probability(0.25).complement().value(), 0.75, 1e-16);
}

TEST(PolarAngle, Domain) {
    EXPECT_THROW(PolarAngle(-0.01), DomainError);
    EXPECT_THROW(PolarAngle(4.0), DomainError);
    EXPECT_THROW(PolarAngle::from_cosine(1.5), DomainError);
    EXPECT_NEAR(PolarAngle::from_cosine(0.5).radians(), kPi / 3, 1e-15);
    EXPECT_THROW(Dimension(1), DomainError);
}

TEST(CapFraction, Examples) {
    EXPECT_NEAR(cap_fraction(PolarAngle(kPi / 2), Dimension(128)).value(), 0.5, 1e-14);
    EXPECT_NEAR(cap_fraction(PolarAngle(kPi / 3), Dimension(3)).value(), 0.25, 1e-14);
    EXPECT_NEAR(cap_fraction(PolarAngle(kPi / 4), Dimension(2)).value(), 0.25, 1e-14);
    EXPECT_EQ(cap_fraction(PolarAngle(0.0), Dimension(7)).value(), 0.0);
    EXPECT_EQ(cap_fraction(PolarAngle(kPi), Dimension(7)).value(), 1.0);
}

TEST(CapFraction, CircleAndSphereOracles) {
    for (int i = 0; i <= 200; ++i) {
        const double t = kPi * i / 200.0;
        EXPECT_NEAR(cap_fraction(PolarAngle(t), Dimension(2)).value(), t / kPi, 1e-10);
        EXPECT_NEAR(cap_fraction(PolarAngle(t), Dimension(3)).value(), (1.0 - std::cos(t)) / 2.0, 1e-10);
    }
}

TEST(CapFraction, MonotoneInTheta) {
    for (std::size_t k : {2u, 3u, 5u, 16u, 128u, 768u, 4096u}) {
        Probability prev = Probability::zero();
        for (int i = 0; i <= 500; ++i) {
            const auto p = cap_fraction(PolarAngle(kPi * i / 500.0), Dimension(k));
            EXPECT_GE(p, prev) << "k=" << k << " i=" << i;
            prev = p;
        }
    }
}

TEST(CapFraction, DensityIntegratesToCap) {
    for (std::size_t k : {2u, 5u, 40u}) {
        for (double t : {0.4, 1.1, 2.5}) {
            const long double integral = oracle::integrate(
                [k](long double x) { return std::exp(static_cast<long double>(log_cap_density(static_cast<double>(x), Dimension(k)))); },
                0.0L, t);
            EXPECT_NEAR(static_cast<double>(integral), cap_fraction(PolarAngle(t), Dimension(k)).value(), 1e-12);
        }
    }
}

TEST(SingleFalsePositive, Examples) {
    EXPECT_NEAR(single_false_positive_prob(0.0, Dimension(768)).value(), 0.5, 1e-14);
    EXPECT_NEAR(single_false_positive_prob(0.5, Dimension(3)).value(), 0.25, 1e-14);
    // Both sides by the quadrature oracle: I_{0.75}(a, 1/2) / 2.
    const double p4 = 0.5 * oracle::incomplete_beta_quadrature(0.75, 1.5, 0.5);
    const double p128 = 0.5 * oracle::incomplete_beta_quadrature(0.75, 63.5, 0.5);
    EXPECT_LT(p128, p4);
    EXPECT_NEAR(single_false_positive_prob(0.5, Dimension(4)).value(), p4, 1e-12);
    EXPECT_NEAR(single_false_positive_prob(0.5, Dimension(128)).value(), p128, 1e-15);
    EXPECT_LT(single_false_positive_prob(0.5, Dimension(128)), single_false_positive_prob(0.5, Dimension(4)));
    EXPECT_THROW(single_false_positive_prob(1.01, Dimension(4)), DomainError);
}

TEST(SingleFalsePositive, AgreesWithCapFraction) {
    for (double c : {-0.9, -0.2, 0.0, 0.3, 0.71, 0.99}) {
        for (std::size_t k : {2u, 3u, 17u, 300u}) {
            EXPECT_NEAR(single_false_positive_prob(c, Dimension(k)).value(),
                        cap_fraction(PolarAngle::from_cosine(c), Dimension(k)).value(), 1e-12);
        }
    }
}

TEST(SingleFalsePositive, StrictlyDecreasingInDimension) {
    for (double c : {0.1, 0.3, 0.5, 0.8, 0.95, 0.999}) {
        Probability prev = Probability::one();
        for (std::size_t k = 2; k <= 1024; k *= 2) {
            const auto p = single_false_positive_prob(c, Dimension(k));
            EXPECT_LT(p, prev) << "cossim=" << c << " k=" << k;
            prev = p;
        }
    }
}

TEST(CompoundFalsePositive, Examples) {
    EXPECT_EQ(compound_false_positive_prob(Probability(0.3), 1).value(), 0.0);
    EXPECT_EQ(compound_false_positive_prob(Probability(0.0), 1'000'000'000).value(), 0.0);
    // 1-(1-1e-6)^(1e6), 40-digit reference value
    EXPECT_NEAR(compound_false_positive_prob(Probability(1e-6), 1'000'001).value(),
                0.6321207427683549057, 1e-15);
    EXPECT_NEAR(compound_false_positive_prob(Probability(0.25), 11).value(),
                1.0 - std::pow(0.75, 10), 1e-15);
}

TEST(CompoundFalsePositive, ExtremeArguments) {
    const std::uint64_t huge = 9'223'372'036'854'775'807ULL;
    const auto tiny = compound_false_positive_prob(Probability(1e-300), 1'000'001);
    EXPECT_NEAR(tiny.value() / 1e-294, 1.0, 1e-12);
    const auto sat = compound_false_positive_prob(Probability(1e-300), huge);
    EXPECT_GT(sat.value(), 0.0);
    EXPECT_NEAR(sat.log(), std::log(1e-300) + std::log(static_cast<double>(huge - 1)), 1e-9);
    const auto deep = compound_false_positive_prob(Probability::from_log(-1000.0), 1000);
    EXPECT_NEAR(deep.log(), -1000.0 + std::log(999.0), 1e-12);
    EXPECT_EQ(compound_false_positive_prob(Probability(1.0), 2).value(), 1.0);
}

TEST(CompoundFalsePositive, MonotoneInBothArguments) {
    SplitMix64 rng(1234);
    for (int trial = 0; trial < 2000; ++trial) {
        const double lp1 = -700.0 * rng.uniform01();
        const double lp2 = lp1 - 5.0 * rng.uniform01();
        const std::uint64_t n1 = 1 + rng.uniform_int(0, 1'000'000'000);
        const std::uint64_t n2 = n1 + rng.uniform_int(0, 1'000'000);
        const auto p1 = Probability::from_log(lp1);
        const auto p2 = Probability::from_log(lp2);
        EXPECT_GE(compound_false_positive_prob(p1, n2), compound_false_positive_prob(p1, n1));
        EXPECT_GE(compound_false_positive_prob(p1, n1), compound_false_positive_prob(p2, n1));
    }
}

TEST(CompoundFalsePositive, StrictlyIncreasingOverDecades) {
    for (double p : {0.4, 1e-3, 1e-9, 1e-200}) {
        Probability prev = Probability::zero();
        for (std::uint64_t n = 10; n <= 100'000'000; n *= 10) {
            const auto c = compound_false_positive_prob(Probability(p), n);
            EXPECT_LT(prev, c) << p << " " << n;
            prev = c;
        }
    }
}

TEST(FalsePositiveModel, ComposesSingleAndCompound) {
    FalsePositiveModel model(Dimension(3), PolarAngle(kPi / 3), 11);
    EXPECT_NEAR(model.single().value(), 0.25, 1e-14);
    EXPECT_NEAR(model.compound().value(), 0.9436864852905273, 1e-12);
    EXPECT_THROW(FalsePositiveModel(Dimension(3), PolarAngle(1.0), 0), DomainError);
}

TEST(MonteCarlo, Examples) {
    auto hemi = mc_cap_fraction(PolarAngle(kPi / 2), Dimension(16), 1'000'000, 42);
    EXPECT_LE(std::fabs(hemi.estimate - 0.5), 3 * hemi.stderr_);
    auto cap3 = mc_cap_fraction(PolarAngle(kPi / 3), Dimension(3), 1'000'000, 7);
    EXPECT_LE(std::fabs(cap3.estimate - 0.25), 3 * cap3.stderr_);
    EXPECT_THROW(mc_cap_fraction(PolarAngle(1.0), Dimension(3), 0, 1), DomainError);
}

TEST(MonteCarlo, HighDimensionCrossCheck) {
    const double analytic = cap_fraction(PolarAngle(1.2), Dimension(64)).value();
    auto est = mc_cap_fraction(PolarAngle(1.2), Dimension(64), 10'000'000, 1);
    EXPECT_LE(std::fabs(est.estimate - analytic), 3 * est.stderr_);
}

TEST(MonteCarlo, AgreesWithAnalyticOnGrid) {
    for (std::size_t k : {2u, 3u, 8u, 64u, 256u}) {
        for (double t : {0.3, 0.8, kPi / 2, 2.0}) {
            const double p = cap_fraction(PolarAngle(t), Dimension(k)).value();
            auto est = mc_cap_fraction(PolarAngle(t), Dimension(k), 1'000'000, 100 + k);
            const double sigma = std::sqrt(p * (1.0 - p) / 1e6);
            EXPECT_LE(std::fabs(est.estimate - p), 4 * sigma) << "k=" << k << " theta=" << t;
        }
    }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
    auto a = mc_cap_fraction(PolarAngle(1.0), Dimension(5), 100'000, 9, 1);
    auto b = mc_cap_fraction(PolarAngle(1.0), Dimension(5), 100'000, 9, 8);
    EXPECT_EQ(a.hits, b.hits);
}

TEST(UniformSphere, UnitNormAndDeterminism) {
    auto one = sample_uniform_sphere(Dimension(8), 1, 0);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_NEAR(norm(one.row(0)), 1.0, 1e-12);
    auto again = sample_uniform_sphere(Dimension(8), 3, 0);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(one.row(0)[i], again.row(0)[i]);
}

TEST(UniformSphere, MeanVectorVanishes) {
    const std::size_t count = 1'000'000;
    auto m = sample_uniform_sphere(Dimension(3), count, 5);
    double mean[3] = {0, 0, 0};
    for (std::size_t i = 0; i < count; ++i) {
        EXPECT_NEAR(norm(m.row(i)), 1.0, 1e-12);
        for (int j = 0; j < 3; ++j) mean[j] += m.row(i)[j];
    }
    const double n = std::sqrt(mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]) / count;
    EXPECT_LT(n, 0.01);
}

TEST(UniformSphere, HighDimensionalNearOrthogonality) {
    auto m = sample_uniform_sphere(Dimension(256), 100'000, 9);
    const double c = dot(m.row(0), m.row(1));
    EXPECT_GT(c, -0.5);
    EXPECT_LT(c, 0.5);
}

}  // namespace
}  // namespace dvlab
