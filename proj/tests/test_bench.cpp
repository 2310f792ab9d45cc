#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "rmdp/average_direct.hpp"
#include "rmdp/bench.hpp"
#include "rmdp/io.hpp"

using namespace rmdp;
using namespace rmdp::bench;
using nlohmann::json;

namespace {

RunConfig small_config(SetKind kind, double radius) {
    RunConfig c;
    c.garnet.n_states = 6;
    c.garnet.n_actions = 3;
    c.kind = kind;
    c.radius = radius;
    c.seeds = {0, 1, 2};
    c.iterations = 30;
    c.report_every = 5;
    c.eval_T = 500;
    c.final_eval_T = 2000;
    c.timing = false;
    c.jobs = 1;
    return c;
}

std::string csv_of(const std::vector<ExperimentRow>& rows, bool timing = false) {
    std::ostringstream out;
    write_csv(out, rows, timing);
    return out.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rmdp_bench_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST(Names, RoundTripAndRejectUnknown) {
    for (auto m : {Method::RobustViLimit, Method::RobustRvi, Method::RobustDvi, Method::NonrobustVi,
                   Method::NonrobustRvi}) {
        EXPECT_EQ(parse_method(to_string(m)), m);
    }
    EXPECT_TRUE(is_robust(Method::RobustDvi));
    EXPECT_FALSE(is_robust(Method::NonrobustRvi));
    EXPECT_THROW(parse_method("robust"), InvalidInput);
    EXPECT_EQ(parse_evaluator("rvi"), Evaluator::Rvi);
    EXPECT_THROW(parse_evaluator("exact"), InvalidInput);
}

TEST(RunConfigJson, FlatKeysOverrideDefaults) {
    auto c = config_from_json(json{{"states", 7}, {"kind", "kl"}, {"radius", 0.8}, {"method", "robust-rvi"},
                                   {"seeds", {3, 4}}, {"iterations", 50}, {"no_timing", true}});
    EXPECT_EQ(c.garnet.n_states, 7u);
    EXPECT_EQ(c.garnet.n_actions, 30u);
    EXPECT_EQ(c.kind, SetKind::KL);
    EXPECT_EQ(c.methods, std::vector<Method>{Method::RobustRvi});
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
    EXPECT_EQ(c.iterations, 50u);
    EXPECT_FALSE(c.timing);

    auto again = config_from_json(to_json(c));
    EXPECT_EQ(to_json(again), to_json(c));
}

TEST(RunConfigJson, PerPairRadiusAndErrors) {
    auto c = config_from_json(json{{"states", 2}, {"actions", 1}, {"radius", {{0.1}, {0.3}}}});
    ASSERT_TRUE(c.radii.has_value());
    auto spec = make_spec(c, 2, 1);
    EXPECT_DOUBLE_EQ(spec.radius(1, 0), 0.3);
    EXPECT_THROW(make_spec(c, 3, 1), InvalidInput);
    EXPECT_THROW(config_from_json(json{{"radius", "wide"}}), InvalidInput);
    EXPECT_THROW(config_from_json(json{{"report_every", 0}}), InvalidInput);
    EXPECT_THROW(config_from_json(json{{"states", "many"}}), InvalidInput);
    EXPECT_THROW(config_from_json(json{{"seeds", json::array()}}), InvalidInput);
    EXPECT_THROW(config_from_json(json::array()), InvalidInput);
}

TEST(Csv, ExactHeaderAndTimingColumn) {
    std::vector<ExperimentRow> rows{{2, 5, Method::RobustRvi, SetKind::TotalVariation, 0.6, 0.25, 12.3456}};
    EXPECT_EQ(csv_of(rows, true), "seed,t,method,kind,radius,robust_avg_reward,elapsed_ms\n"
                                  "2,5,robust-rvi,tv,0.6,0.25,12.346\n");
    EXPECT_EQ(csv_of(rows, false), "seed,t,method,kind,radius,robust_avg_reward,elapsed_ms\n"
                                   "2,5,robust-rvi,tv,0.6,0.25,0\n");
    EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Solve, SingleActionPolicyIsTheOnlyRow) {
    auto m = fixtures::smoothed_chain();
    auto c = small_config(SetKind::Contamination, 0.4);
    auto out = solve(m, c, Method::RobustRvi, 0);
    EXPECT_TRUE(out.converged);
    EXPECT_EQ(policy_from_json(out.report["policy"], 1), Policy::uniform(2, 1));
    EXPECT_NEAR(out.report["gain"].get<double>(), fixtures::kSmoothedChainGain, 1e-5);
}

TEST(Solve, ZeroRadiusRobustEqualsNonrobust) {
    auto m = fixtures::positive_garnet(6, 3, 5);
    auto c = small_config(SetKind::KL, 0.0);
    c.iterations.reset();
    auto robust = solve(m, c, Method::RobustRvi, 5);
    auto nominal = solve(m, c, Method::NonrobustRvi, 5);
    EXPECT_NEAR(robust.report["gain"].get<double>(), nominal.report["gain"].get<double>(), 1e-6);
    EXPECT_LE(robust.report["residuals"]["optimality"].get<double>(), 1e-6);
}

TEST(Solve, RerunGivesIdenticalCsv) {
    auto m = fixtures::positive_garnet(5, 3, 9);
    auto c = small_config(SetKind::TotalVariation, 0.3);
    for (Method method : {Method::RobustViLimit, Method::RobustRvi, Method::RobustDvi}) {
        EXPECT_EQ(csv_of(solve(m, c, method, 9).rows), csv_of(solve(m, c, method, 9).rows)) << to_string(method);
    }
}

TEST(Solve, SerializedPolicyReproducesReportedReward) {
    auto m = fixtures::positive_garnet(5, 3, 11);
    for (auto evaluator : {Evaluator::Limit, Evaluator::Rvi}) {
        auto c = small_config(SetKind::KL, 0.5);
        c.evaluator = evaluator;
        for (Method method : {Method::RobustViLimit, Method::NonrobustRvi, Method::RobustDvi}) {
            auto out = solve(m, c, method, 11);
            auto reloaded = json::parse(out.report.dump());
            auto policy = policy_from_json(reloaded["policy"], 3);
            const double again = robust_avg_reward(m, make_spec(c, 5, 3), policy, evaluator,
                                                   reloaded["eval_T"].get<std::size_t>());
            EXPECT_NEAR(again, reloaded["robust_avg_reward"].get<double>(), 1e-6);
        }
    }
}

TEST(Solve, ReportsNonConvergence) {
    auto c = small_config(SetKind::Contamination, 0.0);
    c.iterations = 10;
    auto out = solve(fixtures::two_state_cycle(), c, Method::NonrobustRvi, 0);
    EXPECT_FALSE(out.converged);
    EXPECT_FALSE(out.report["converged"].get<bool>());
    EXPECT_TRUE(out.report.contains("policy"));
}

TEST(PolicyScorer, MemoizesDistinctPolicies) {
    auto m = fixtures::positive_garnet(4, 2, 1);
    auto spec = UncertaintySpec(SetKind::TotalVariation, 0.2);
    PolicyScorer scorer(m, spec, Evaluator::Limit);
    auto pi = Policy::uniform(4, 2);
    const double first = scorer(pi, 300);
    EXPECT_EQ(scorer(pi, 300), first);
    EXPECT_EQ(scorer.evaluations(), 1u);
    scorer(pi, 400);
    EXPECT_EQ(scorer.evaluations(), 2u);
}

TEST(Compare, OrderingRowsAndDeterminism) {
    for (auto [kind, radius] : {std::pair{SetKind::Contamination, 0.4}, {SetKind::TotalVariation, 0.6},
                                {SetKind::KL, 0.8}}) {
        auto c = small_config(kind, radius);
        auto out = compare(c);
        EXPECT_TRUE(out.ordering_holds) << to_string(kind);
        EXPECT_EQ(out.summary["ordering"].size(), 6u);
        // 7 grid points (0..30 step 5) per method and seed
        EXPECT_EQ(out.rows.size(), 3u * 4u * 7u);
        for (std::size_t i = 1; i < out.rows.size(); ++i) {
            const auto& a = out.rows[i - 1];
            const auto& b = out.rows[i];
            EXPECT_TRUE(a.seed < b.seed || (a.seed == b.seed && a.t <= b.t));
        }
        for (const auto& r : out.rows) {
            EXPECT_GE(r.robust_avg_reward, 0.0);
            EXPECT_LE(r.robust_avg_reward, 1.0);
        }
        auto threaded = c;
        threaded.jobs = 3;
        EXPECT_EQ(csv_of(compare(threaded).rows), csv_of(out.rows));
    }
}

TEST(Compare, NeedsTwoMethods) {
    auto c = small_config(SetKind::Contamination, 0.4);
    c.methods = {Method::RobustRvi};
    EXPECT_THROW(compare(c), InvalidInput);
}

TEST(Compare, OutputsAreByteIdentical) {
    auto c = small_config(SetKind::Contamination, 0.4);
    auto dir = scratch("compare");
    c.out_dir = dir.string();
    const auto stem = compare_stem(c);
    EXPECT_EQ(stem, "compare-contamination-R0.4");
    write_compare_outputs(compare(c), c, stem);
    const auto csv = slurp(dir / (stem + ".csv"));
    const auto svg = slurp(dir / (stem + ".svg"));
    write_compare_outputs(compare(c), c, stem);
    EXPECT_EQ(slurp(dir / (stem + ".csv")), csv);
    EXPECT_EQ(slurp(dir / (stem + ".svg")), svg);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    for (Method m : c.methods) EXPECT_NE(svg.find(to_string(m)), std::string::npos);
    auto summary = json::parse(slurp(dir / (stem + ".json")));
    EXPECT_TRUE(summary["ordering_holds"].get<bool>());
    EXPECT_EQ(summary["seeds"].size(), 3u);
    std::filesystem::remove_all(dir);
}

TEST(Check, AssumptionTwoGarnetPasses) {
    auto m = fixtures::positive_garnet(5, 3, 2);
    for (auto [kind, radius] : {std::pair{SetKind::Contamination, 0.3}, {SetKind::TotalVariation, 0.005},
                                {SetKind::KL, 0.005}}) {
        auto report = run_check(m, UncertaintySpec(kind, radius), 2);
        for (const auto& p : report.properties) EXPECT_TRUE(p.passed) << to_string(kind) << ' ' << p.name << ' ' << p.measured;
        EXPECT_TRUE(report.warnings.empty()) << to_string(kind);
    }
}

TEST(Check, CorruptedRowFailsValidation) {
    auto m = fixtures::positive_garnet(4, 2, 0);
    m.kernel(1, 1, 0) += 0.2;
    auto report = run_check(m, UncertaintySpec(SetKind::KL, 0.1));
    EXPECT_FALSE(report.passed());
    ASSERT_EQ(report.properties.size(), 1u);
    EXPECT_EQ(report.properties[0].name, "model.valid");
    EXPECT_NE(report.properties[0].note.find("(s=1, a=1)"), std::string::npos) << report.properties[0].note;
}

TEST(Check, ZeroRadiusAddsNominalEquality) {
    auto report = run_check(fixtures::positive_garnet(4, 2, 3), UncertaintySpec(SetKind::TotalVariation, 0.0));
    EXPECT_TRUE(report.passed());
    auto it = std::find_if(report.properties.begin(), report.properties.end(),
                           [](const Property& p) { return p.name == "nominal.robust_equals_nonrobust"; });
    ASSERT_NE(it, report.properties.end());
    EXPECT_LE(it->measured, 1e-6);
    EXPECT_TRUE(report.to_json()["passed"].get<bool>());
}

TEST(Plumbing, EnsureDirectoryNamesPath) {
    auto file = scratch("file");
    std::ofstream(file) << "x";
    try {
        ensure_directory((file / "sub").string());
        FAIL() << "expected InvalidInput";
    } catch (const InvalidInput& e) {
        EXPECT_NE(std::string(e.what()).find(file.string()), std::string::npos);
    }
    std::filesystem::remove(file);
}

TEST(Plumbing, ParallelForCoversAndPropagates) {
    std::vector<int> hit(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { hit[i] += 1; });
    EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 50);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                     if (i == 7) throw InvalidInput("boom");
                 }),
                 InvalidInput);
}
