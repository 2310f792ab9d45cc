#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/uncertainty.hpp"

using namespace rmdp;

namespace {

const Vector kHalf{0.5, 0.5};
const Vector kZeroOne{0.0, 1.0};

SupportResult by_kind(SetKind kind, std::span<const double> p, std::span<const double> v, double r) {
    switch (kind) {
    case SetKind::Contamination:
        return support_contamination(p, v, r);
    case SetKind::TotalVariation:
        return support_tv(p, v, r);
    case SetKind::KL:
        return support_kl(p, v, r);
    }
    return {};
}

double random_radius(std::mt19937_64& rng, SetKind kind) {
    const double hi = kind == SetKind::KL ? 2.0 : 1.0;
    return fixtures::random_vector(rng, 1, 0.0, hi)[0];
}

constexpr SetKind kKinds[] = {SetKind::Contamination, SetKind::TotalVariation, SetKind::KL};

} // namespace

TEST(Contamination, HandExample) {
    auto r = support_contamination(kHalf, kZeroOne, 0.4);
    EXPECT_NEAR(r.value, 0.3, 1e-15);
    EXPECT_NEAR(r.minimizer[0], 0.7, 1e-15);
    EXPECT_NEAR(r.minimizer[1], 0.3, 1e-15);
    EXPECT_NEAR(oracle::oracle_support(SetKind::Contamination, kHalf, kZeroOne, 0.4, 1e-4), 0.3, 1e-4);
}

TEST(Contamination, DegenerateRadii) {
    const Vector p{0.2, 0.3, 0.5};
    const Vector v{0.4, -1.0, 2.0};
    auto r0 = support_contamination(p, v, 0.0);
    EXPECT_DOUBLE_EQ(r0.value, dot(p, v));
    EXPECT_EQ(r0.minimizer, p);
    EXPECT_DOUBLE_EQ(support_contamination(p, v, 1.0).value, -1.0);
}

TEST(Contamination, TieGoesToLowestIndex) {
    auto r = support_contamination(Vector{0.2, 0.3, 0.5}, Vector{1.0, 0.0, 0.0}, 0.5);
    EXPECT_DOUBLE_EQ(r.minimizer[1], 0.15 + 0.5);
    EXPECT_DOUBLE_EQ(r.minimizer[2], 0.25);
}

TEST(Contamination, RadiusDomain) {
    EXPECT_THROW(support_contamination(kHalf, kZeroOne, 1.1), RadiusDomainError);
    EXPECT_THROW(support_contamination(kHalf, kZeroOne, -0.1), RadiusDomainError);
}

TEST(TotalVariation, HandExamples) {
    auto r = support_tv(kHalf, kZeroOne, 0.25);
    EXPECT_NEAR(r.value, 0.25, 1e-15);
    EXPECT_NEAR(r.minimizer[0], 0.75, 1e-15);
    EXPECT_NEAR(oracle::tv_vertex_enumeration(kHalf, kZeroOne, 0.25), 0.25, 1e-12);

    auto full = support_tv(kHalf, kZeroOne, 0.6);
    EXPECT_NEAR(full.value, 0.0, 1e-15);
    EXPECT_EQ(full.minimizer, (Vector{1.0, 0.0}));
    EXPECT_NEAR(oracle::oracle_support(SetKind::TotalVariation, kHalf, kZeroOne, 0.6, 1e-4), 0.0, 1e-4);
}

TEST(TotalVariation, ConstantValueVector) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        auto p = fixtures::random_distribution(rng, 5);
        EXPECT_NEAR(support_tv(p, Vector(5, 2.5), random_radius(rng, SetKind::TotalVariation)).value, 2.5, 1e-12);
    }
}

TEST(TotalVariation, RadiusDomain) {
    EXPECT_THROW(support_tv(kHalf, kZeroOne, 1.5), RadiusDomainError);
}

TEST(KL, HandExample) {
    const double value = support_kl(kHalf, kZeroOne, 0.02).value;
    EXPECT_NEAR(value, 0.4003, 1e-3);
    // independent routes: boundary bisection and primal grid
    EXPECT_NEAR(value, oracle::kl_two_state_bisection(kHalf, kZeroOne, 0.02), 1e-8);
    EXPECT_NEAR(oracle::oracle_support(SetKind::KL, kHalf, kZeroOne, 0.02, 1e-5), 0.4003, 1e-3);
}

TEST(KL, ZeroRadiusAndConstantVector) {
    const Vector p{0.1, 0.6, 0.3};
    const Vector v{3.0, -1.0, 0.5};
    EXPECT_DOUBLE_EQ(support_kl(p, v, 0.0).value, dot(p, v));
    EXPECT_NEAR(support_kl(p, Vector(3, -0.7), 0.9).value, -0.7, 1e-12);
}

TEST(KL, LargeRadiusReachesArgminFace) {
    // -log p(argmin) = log 2 < 1, so the ball contains the point mass on state 0
    auto r = support_kl(kHalf, kZeroOne, 1.0);
    EXPECT_NEAR(r.value, 0.0, 1e-9);
    EXPECT_NEAR(r.minimizer[0], 1.0, 1e-9);
}

TEST(KL, ZeroMassStatesStayExcluded) {
    const Vector p{0.0, 0.5, 0.5};
    const Vector v{-10.0, 0.0, 1.0};
    auto r = support_kl(p, v, 0.3);
    EXPECT_EQ(r.minimizer[0], 0.0);
    EXPECT_GE(r.value, 0.0);
    EXPECT_NEAR(r.value, oracle::kl_two_state_bisection(Vector{0.5, 0.5}, Vector{0.0, 1.0}, 0.3), 1e-8);
}

TEST(KL, Errors) {
    EXPECT_THROW(support_kl(kHalf, kZeroOne, -0.1), RadiusDomainError);
    EXPECT_THROW(support_kl(Vector{0.5, 0.6}, kZeroOne, 0.1), InvalidInput);
}

TEST(Support, DispatchMatchesKindFunctions) {
    const Vector p{0.2, 0.5, 0.3};
    const Vector v{0.1, 0.9, 0.4};
    for (SetKind kind : kKinds) {
        UncertaintySpec spec(kind, 0.3);
        auto direct = by_kind(kind, p, v, 0.3);
        auto dispatched = support(spec, 0, 0, p, v);
        EXPECT_DOUBLE_EQ(dispatched.value, direct.value);
        EXPECT_EQ(dispatched.minimizer, direct.minimizer);
    }
}

TEST(Support, PerPairRadius) {
    Matrix radii(2, 1);
    radii(0, 0) = 0.0;
    radii(1, 0) = 1.0;
    UncertaintySpec spec(SetKind::Contamination, radii);
    EXPECT_DOUBLE_EQ(support(spec, 0, 0, kHalf, kZeroOne).value, 0.5);
    EXPECT_DOUBLE_EQ(support(spec, 1, 0, kHalf, kZeroOne).value, 0.0);
}

TEST(Support, SpecRejectsBadRadii) {
    EXPECT_THROW(UncertaintySpec(SetKind::TotalVariation, 1.2), RadiusDomainError);
    EXPECT_THROW(UncertaintySpec(SetKind::KL, -1.0), RadiusDomainError);
    EXPECT_NO_THROW(UncertaintySpec(SetKind::KL, 5.0));
}

TEST(Support, OracleAgreementOnSmallInstances) {
    std::mt19937_64 rng(2024);
    for (SetKind kind : kKinds) {
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 2 + trial % 2;
            auto p = fixtures::random_distribution(rng, n);
            auto v = fixtures::random_vector(rng, n);
            const double r = random_radius(rng, kind);
            const double closed = by_kind(kind, p, v, r).value;
            const double grid = oracle::oracle_support(kind, p, v, r, 1e-5);
            EXPECT_NEAR(closed, grid, kind == SetKind::KL ? 1e-3 : 1e-4)
                << to_string(kind) << " trial " << trial;
            if (kind == SetKind::TotalVariation) {
                EXPECT_NEAR(closed, oracle::tv_vertex_enumeration(p, v, r), 1e-10);
            }
            if (kind == SetKind::KL && n == 2) {
                EXPECT_NEAR(closed, oracle::kl_two_state_bisection(p, v, r), 1e-8);
            }
        }
    }
}

TEST(SupportProperties, FeasibilityTranslationLipschitzMonotone) {
    std::mt19937_64 rng(77);
    for (SetKind kind : kKinds) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + trial % 6;
            auto p = fixtures::random_distribution(rng, n);
            auto v = fixtures::random_vector(rng, n, -2, 2);
            auto w = fixtures::random_vector(rng, n, -2, 2);
            const double r = random_radius(rng, kind);
            const auto sv = by_kind(kind, p, v, r);
            const auto sw = by_kind(kind, p, w, r);

            EXPECT_LE(sv.value, dot(p, v) + 1e-10);

            const double c = fixtures::random_vector(rng, 1, -5, 5)[0];
            auto shifted = v;
            for (double& x : shifted) x += c;
            EXPECT_NEAR(by_kind(kind, p, shifted, r).value, sv.value + c, 1e-10);

            EXPECT_LE(std::abs(sv.value - sw.value), max_abs_diff(v, w) + 1e-10);

            auto upper = v;
            for (double& x : upper) x += fixtures::random_vector(rng, 1, 0, 1)[0];
            EXPECT_LE(sv.value, by_kind(kind, p, upper, r).value + 1e-10);

            const double r2 = std::min(kind == SetKind::KL ? 10.0 : 1.0, r + 0.2);
            EXPECT_GE(sv.value, by_kind(kind, p, v, r2).value - 1e-10);
        }
    }
}

TEST(SupportProperties, ResultSelfConsistency) {
    std::mt19937_64 rng(5);
    for (SetKind kind : kKinds) {
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 2 + trial % 7;
            auto p = fixtures::random_distribution(rng, n);
            auto v = fixtures::random_vector(rng, n);
            const double r = random_radius(rng, kind);
            const auto res = by_kind(kind, p, v, r);
            double sum = 0.0;
            for (double q : res.minimizer) {
                EXPECT_GE(q, 0.0);
                sum += q;
            }
            EXPECT_NEAR(sum, 1.0, 1e-10);
            EXPECT_LE(membership_defect(kind, p, res.minimizer, r), 1e-8) << to_string(kind);
            EXPECT_NEAR(dot(res.minimizer, v), res.value, 1e-8) << to_string(kind);
        }
    }
}

TEST(SupportEvaluator, InteriorSmoothingMixesWithUniform) {
    UncertaintySpec spec(SetKind::Contamination, 1.0, 0.1);
    SupportEvaluator eval(spec, kZeroOne);
    auto res = eval.result(0, 0, kHalf);
    EXPECT_NEAR(res.value, 0.9 * 0.0 + 0.1 * 0.5, 1e-15);
    EXPECT_NEAR(res.minimizer[1], 0.05, 1e-15);
    EXPECT_DOUBLE_EQ(eval.value(0, 0, kHalf), res.value);
}

TEST(WorstKernel, DegenerateAndFullRadius) {
    auto m = fixtures::positive_garnet(4, 2, 3);
    const Vector v{0.3, 0.1, 0.7, 0.1};
    EXPECT_EQ(worst_kernel(m, UncertaintySpec::nominal(), v), m.kernel);
    auto full = worst_kernel(m, UncertaintySpec(SetKind::Contamination, 1.0), v);
    for (std::size_t s = 0; s < 4; ++s) {
        for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(full(s, a, 1), 1.0);
    }
    EXPECT_TRUE(validate_kernel(worst_kernel(m, UncertaintySpec(SetKind::KL, 0.5), v)).empty());
}

TEST(WorstKernel, CycleUnderContamination) {
    auto m = fixtures::two_state_cycle();
    auto k = worst_kernel(m, UncertaintySpec(SetKind::Contamination, 0.4), kZeroOne);
    EXPECT_NEAR(k(0, 0, 0), 0.4, 1e-15);
    EXPECT_NEAR(k(0, 0, 1), 0.6, 1e-15);
    EXPECT_NEAR(k(1, 0, 0), 1.0, 1e-15);
    EXPECT_NEAR(k(1, 0, 1), 0.0, 1e-15);
    for (std::size_t s = 0; s < 2; ++s) {
        const double direct = support_contamination(m.kernel.row(s, 0), kZeroOne, 0.4).value;
        EXPECT_NEAR(oracle::oracle_support(SetKind::Contamination, m.kernel.row(s, 0), kZeroOne, 0.4, 1e-5),
                    direct, 1e-4);
    }
}

TEST(OracleSupport, RefusesLargeInstances) {
    EXPECT_THROW(oracle::oracle_support(SetKind::KL, Vector(5, 0.2), Vector(5, 0.0), 0.1, 1e-3),
                 InvalidInput);
}

// The TV dual as printed minimizes span(v - μ) over μ ≥ 0; for v ≥ 0 the choice
// μ = v - min(v) makes the span zero and the formula returns the nominal value. The
// shifted form max_μ {p·(v-μ) - R·sp(v-μ)} reproduces the LP, which is why the solver
// uses the greedy LP rule.
TEST(TotalVariation, PrintedDualVersusLp) {
    const double lp = support_tv(kHalf, kZeroOne, 0.25).value;
    EXPECT_NEAR(oracle::tv_printed_dual(kHalf, kZeroOne, 0.25, 2.0, 0.01), 0.5, 1e-12);
    EXPECT_NEAR(oracle::tv_shifted_dual(kHalf, kZeroOne, 0.25, 2.0, 0.01), lp, 1e-12);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = fixtures::random_distribution(rng, 2);
        auto v = fixtures::random_vector(rng, 2);
        const double r = fixtures::random_vector(rng, 1)[0];
        EXPECT_NEAR(oracle::tv_shifted_dual(p, v, r, 1.0, 0.005), support_tv(p, v, r).value, 5e-3);
    }
}
