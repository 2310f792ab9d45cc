#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rmdp/average_direct.hpp"
#include "rmdp/average_limit.hpp"
#include "rmdp/chain.hpp"
#include "rmdp/oracle.hpp"

using namespace rmdp;

namespace {

const SetKind kKinds[] = {SetKind::Contamination, SetKind::TotalVariation, SetKind::KL};

} // namespace

TEST(RviOpControl, Examples) {
    auto m = fixtures::positive_garnet(4, 3, 2);
    auto spec = UncertaintySpec(SetKind::KL, 0.3);
    auto l0 = rvi_op_control(m, spec, Vector(4, 0.0));
    for (std::size_t s = 0; s < 4; ++s) {
        auto row = m.rewards.row(s);
        EXPECT_DOUBLE_EQ(l0[s], *std::max_element(row.begin(), row.end()));
    }
    auto lc = rvi_op_control(m, spec, Vector(4, 2.5));
    for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(lc[s], l0[s] + 2.5, 1e-12);

    auto one = fixtures::single_state(0.4);
    EXPECT_NEAR(rvi_op_control(one, spec, Vector{3.0})[0], 3.4, 1e-15);
}

TEST(RobustRviControl, SingleState) {
    auto res = robust_rvi_control(fixtures::single_state(0.6), UncertaintySpec(SetKind::TotalVariation, 0.5));
    EXPECT_TRUE(res.report.converged);
    EXPECT_EQ(res.report.iterations, 1u);
    EXPECT_DOUBLE_EQ(res.gain, 0.6);
    EXPECT_EQ(res.solution.bias, Vector{0.0});
}

TEST(RobustRviControl, SmoothedChainNominalIsSymmetric) {
    auto res = robust_rvi_control(fixtures::smoothed_chain(), UncertaintySpec::nominal());
    EXPECT_TRUE(res.report.converged);
    EXPECT_NEAR(res.gain, 0.5, 1e-6);
}

TEST(RobustRviControl, SmoothedChainUnderContamination) {
    auto res = robust_rvi_control(fixtures::smoothed_chain(), UncertaintySpec(SetKind::Contamination, 0.4));
    EXPECT_NEAR(res.gain, fixtures::kSmoothedChainGain, 1e-5);
    EXPECT_LE(res.report.residual, 1e-6);
    EXPECT_EQ(res.solution.gain, Vector(2, res.gain));
}

TEST(RobustRviEval, Examples) {
    auto m = fixtures::smoothed_chain();
    auto spec = UncertaintySpec(SetKind::Contamination, 0.4);
    auto eval = robust_rvi_eval(m, spec, Policy::uniform(2, 1));
    auto ctrl = robust_rvi_control(m, spec);
    EXPECT_EQ(eval.gain, ctrl.gain);
    EXPECT_EQ(eval.solution.bias, ctrl.solution.bias);
    EXPECT_NEAR(eval.gain, fixtures::kSmoothedChainGain, 1e-5);
    EXPECT_LE(eval.report.residual, 1e-6);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto g = fixtures::positive_garnet(5, 3, seed);
        auto pi = Policy::uniform(5, 3);
        auto nominal = robust_rvi_eval(g, UncertaintySpec(SetKind::KL, 0.0), pi);
        EXPECT_NEAR(nominal.gain, gain_and_bias(g, g.kernel, pi).gain[0], 1e-6);
    }
}

TEST(RobustRvi, PeriodicChainReportsNonConvergence) {
    auto res = robust_rvi_control(fixtures::two_state_cycle(), UncertaintySpec::nominal(), {.max_iter = 1000});
    EXPECT_FALSE(res.report.converged);
    EXPECT_EQ(res.report.iterations, 1000u);
    EXPECT_FALSE(res.report.warnings.empty());
}

TEST(RobustRvi, RejectsBadParameters) {
    auto m = fixtures::smoothed_chain();
    EXPECT_THROW(robust_rvi_control(m, UncertaintySpec::nominal(), {.epsilon = 0.0}), InvalidInput);
    EXPECT_THROW(robust_rvi_control(m, UncertaintySpec::nominal(), {.ref_state = 2}), InvalidInput);
}

TEST(OptimalityResidual, Examples) {
    auto m = fixtures::positive_garnet(5, 3, 4);
    auto spec = UncertaintySpec(SetKind::TotalVariation, 0.3);
    auto res = robust_rvi_control(m, spec, {.epsilon = 1e-8});
    EXPECT_LE(optimality_residual(m, spec, res.gain, res.solution.bias), 1e-6);
    EXPECT_GE(optimality_residual(m, spec, res.gain + 0.1, res.solution.bias), 0.1 - 1e-6);
    EXPECT_EQ(optimality_residual(fixtures::single_state(0.3), spec, 0.3, Vector{0.0}), 0.0);
}

TEST(BellmanResidualEval, Examples) {
    auto m = fixtures::smoothed_chain();
    auto spec = UncertaintySpec(SetKind::Contamination, 0.4);
    auto pi = Policy::uniform(2, 1);
    auto res = robust_rvi_eval(m, spec, pi);
    EXPECT_LE(bellman_residual_eval(m, spec, pi, res.gain, res.solution.bias), 1e-6);

    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto v = fixtures::random_vector(rng, 2, -1, 1);
        const double g = fixtures::random_vector(rng, 1)[0];
        auto shifted = v;
        for (double& x : shifted) x += 0.75;
        EXPECT_NEAR(bellman_residual_eval(m, spec, pi, g, v), bellman_residual_eval(m, spec, pi, g, shifted), 1e-12);

        // defect by hand: argmin of v receives the contaminating mass
        const std::size_t lo = v[0] <= v[1] ? 0 : 1;
        double expected = 0.0;
        for (std::size_t s = 0; s < 2; ++s) {
            const double sigma = 0.6 * (m.kernel(s, 0, 0) * v[0] + m.kernel(s, 0, 1) * v[1]) + 0.4 * v[lo];
            expected = std::max(expected, std::abs(m.rewards(s, 0) + sigma - g - v[s]));
        }
        EXPECT_NEAR(bellman_residual_eval(m, spec, pi, g, v), expected, 1e-14);
    }
}

TEST(StationaryEquivalence, Examples) {
    auto chain = fixtures::smoothed_chain();
    auto nominal = check_stationary_equivalence(chain, UncertaintySpec::nominal(), Policy::uniform(2, 1));
    EXPECT_TRUE(nominal.passed);
    EXPECT_NEAR(nominal.difference, 0.0, 1e-7);

    auto cont = check_stationary_equivalence(chain, UncertaintySpec(SetKind::Contamination, 0.4), Policy::uniform(2, 1));
    EXPECT_TRUE(cont.passed);
    EXPECT_NEAR(cont.stationary_gain, fixtures::kSmoothedChainGain, 1e-9);

    auto g = fixtures::positive_garnet(4, 2, 17);
    auto spec = UncertaintySpec(SetKind::TotalVariation, 0.3);
    auto opt = robust_rvi_control(g, spec);
    auto tv = check_stationary_equivalence(g, spec, opt.policy);
    EXPECT_TRUE(tv.passed) << tv.difference;
}

TEST(RviProperties, SpanNonExpansive) {
    std::mt19937_64 rng(55);
    for (SetKind kind : kKinds) {
        auto m = fixtures::positive_garnet(6, 3, 40);
        auto spec = UncertaintySpec(kind, kind == SetKind::KL ? 0.3 : 0.2, 0.01);
        for (int trial = 0; trial < 50; ++trial) {
            auto v = fixtures::random_vector(rng, 6, -2, 2);
            auto u = fixtures::random_vector(rng, 6, -2, 2);
            auto lv = rvi_op_control(m, spec, v);
            auto lu = rvi_op_control(m, spec, u);
            Vector dl(6), d(6);
            for (std::size_t s = 0; s < 6; ++s) {
                dl[s] = lv[s] - lu[s];
                d[s] = v[s] - u[s];
            }
            EXPECT_LE(span(dl), span(d) + 1e-12);
        }
    }
}

TEST(RviProperties, GainSandwichOrderingAndRadiusMonotonicity) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto m = fixtures::positive_garnet(5, 3, seed);
        auto rewards = m.rewards.data();
        const double rmin = *std::min_element(rewards.begin(), rewards.end());
        const double rmax = *std::max_element(rewards.begin(), rewards.end());
        for (SetKind kind : kKinds) {
            double previous = std::numeric_limits<double>::infinity();
            for (double radius : {0.0, 0.1, 0.3, 0.6}) {
                auto spec = UncertaintySpec(kind, radius);
                auto res = robust_rvi_control(m, spec);
                EXPECT_GE(res.gain, rmin);
                EXPECT_LE(res.gain, rmax);
                EXPECT_LE(res.gain, previous + 1e-6);
                previous = res.gain;
                auto pi = Policy::uniform(5, 3);
                EXPECT_LE(robust_rvi_eval(m, spec, pi).gain, gain_and_bias(m, m.kernel, pi).gain[0] + 1e-8);
            }
        }
    }
}

TEST(RviProperties, AgreesWithLimitMethod) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto m = fixtures::positive_garnet(5, 3, 100 + seed);
        for (SetKind kind : kKinds) {
            auto spec = UncertaintySpec(kind, kind == SetKind::KL ? 0.5 : 0.3);
            auto rvi = robust_rvi_control(m, spec);
            auto lim = robust_avg_control_limit(m, spec);
            EXPECT_EQ(rvi.policy, lim.policy);
            for (double v : lim.value) EXPECT_NEAR(v, rvi.gain, 5e-3);
        }
    }
}

TEST(PositivityWarnings, FlagsSetsThatReachZero) {
    auto m = fixtures::smoothed_chain();
    EXPECT_TRUE(positivity_warnings(m, UncertaintySpec(SetKind::Contamination, 0.4)).empty());
    EXPECT_FALSE(positivity_warnings(m, UncertaintySpec(SetKind::Contamination, 1.0)).empty());
    EXPECT_FALSE(positivity_warnings(m, UncertaintySpec(SetKind::TotalVariation, 0.1)).empty());
    EXPECT_TRUE(positivity_warnings(m, UncertaintySpec(SetKind::TotalVariation, 0.05)).empty());
    EXPECT_TRUE(positivity_warnings(m, UncertaintySpec(SetKind::KL, 0.1)).empty());
    EXPECT_FALSE(positivity_warnings(m, UncertaintySpec(SetKind::KL, 0.2)).empty());
    EXPECT_TRUE(positivity_warnings(m, UncertaintySpec(SetKind::TotalVariation, 0.5, 0.01)).empty());
    EXPECT_FALSE(positivity_warnings(fixtures::two_state_cycle(), UncertaintySpec::nominal()).empty());
}
