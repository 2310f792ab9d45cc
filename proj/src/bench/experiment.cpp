#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "rmdp/average_direct.hpp"
#include "rmdp/average_limit.hpp"
#include "rmdp/bellman.hpp"
#include "rmdp/bench.hpp"
#include "rmdp/discounted.hpp"
#include "rmdp/io.hpp"

namespace rmdp::bench {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool is_limit(Method m) { return m == Method::RobustViLimit || m == Method::NonrobustVi; }
bool is_rvi(Method m) { return m == Method::RobustRvi || m == Method::NonrobustRvi; }

/// Scalar radius for CSV rows; the largest entry when radii vary per pair.
double row_radius(const RunConfig& c) {
    if (!c.radii) return c.radius;
    const auto& d = c.radii->data();
    return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

json radius_json(const RunConfig& c) { return to_json(c).at("radius"); }

/// Greedy policy the method would extract from iterate `v` after `t` iterations.
Policy greedy_at(const MdpModel& model, const UncertaintySpec& spec, Method method, const RunConfig& c,
                 std::size_t t, std::span<const double> v) {
    if (is_limit(method)) {
        const double gamma = gamma_schedule(t == 0 ? 0 : t - 1);
        return greedy_policy(robust_q_values(model, spec, v, 1.0 - gamma, gamma));
    }
    if (is_rvi(method)) return greedy_policy(robust_q_values(model, spec, v, 1.0, 1.0));
    return greedy_policy(robust_q_values(model, spec, v, 1.0, c.gamma));
}

std::size_t solver_default_budget(Method method) {
    if (is_limit(method)) return LimitSolveParams{}.T;
    if (is_rvi(method)) return RviParams{}.max_iter;
    return DiscountedSolveParams{}.max_iter;
}

} // namespace

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool timing) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.seed << ',' << r.t << ',' << to_string(r.method) << ',' << to_string(r.kind) << ','
            << format_number(r.radius) << ',' << format_number(r.robust_avg_reward) << ','
            << (timing ? format_number(std::round(r.elapsed_ms * 1000.0) / 1000.0) : "0") << '\n';
    }
}

void sort_rows(std::vector<ExperimentRow>& rows, const std::vector<Method>& order) {
    auto rank = [&](Method m) { return std::find(order.begin(), order.end(), m) - order.begin(); };
    std::stable_sort(rows.begin(), rows.end(), [&](const ExperimentRow& a, const ExperimentRow& b) {
        if (a.seed != b.seed) return a.seed < b.seed;
        if (a.t != b.t) return a.t < b.t;
        return rank(a.method) < rank(b.method);
    });
}

double robust_avg_reward(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                         Evaluator evaluator, std::size_t horizon) {
    if (evaluator == Evaluator::Rvi) return robust_rvi_eval(model, spec, policy, {.epsilon = 1e-10}).gain;
    return mean(robust_avg_eval_limit(model, spec, policy, {.T = horizon}).value);
}

double PolicyScorer::operator()(const Policy& policy, std::size_t horizon) {
    const std::size_t key_horizon = evaluator_ == Evaluator::Rvi ? 0 : horizon;
    auto key = std::make_pair(key_horizon, policy.probs().data());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double score = robust_avg_reward(model_, spec_, policy, evaluator_, horizon);
    cache_.emplace(std::move(key), score);
    return score;
}

Curve run_curve(const MdpModel& model, const RunConfig& c, Method method, std::uint64_t seed,
                PolicyScorer& scorer, std::size_t default_budget, bool pad_to_budget) {
    const auto robust_spec = make_spec(c, model.n_states(), model.n_actions());
    const auto solver_spec = is_robust(method) ? robust_spec : UncertaintySpec::nominal();
    const std::size_t budget = c.iterations.value_or(default_budget);

    struct Point {
        std::size_t t;
        Policy policy;
        double elapsed_ms;
    };
    std::vector<Point> points;
    double extraction_ms = 0.0;
    const auto start = Clock::now();
    auto record = [&](std::size_t t, std::span<const double> v) {
        if (t % c.report_every != 0 && t != budget) return;
        const double solver_ms = ms_since(start) - extraction_ms;
        const auto before = Clock::now();
        points.push_back({t, greedy_at(model, solver_spec, method, c, t, v), solver_ms});
        extraction_ms += ms_since(before);
    };
    record(0, Vector(model.n_states(), 0.0));

    Curve curve;
    curve.method = method;
    if (is_limit(method)) {
        auto res = robust_avg_control_limit(model, solver_spec, {.T = budget, .observer = record});
        curve.final_policy = std::move(res.policy);
        curve.value = std::move(res.value);
        curve.gain = mean(curve.value);
        curve.report = std::move(res.report);
    } else if (is_rvi(method)) {
        auto res = robust_rvi_control(model, solver_spec, {.epsilon = c.epsilon, .max_iter = budget, .observer = record});
        curve.final_policy = std::move(res.policy);
        curve.value = std::move(res.solution.bias);
        curve.gain = res.gain;
        curve.report = std::move(res.report);
    } else {
        auto res = robust_dvi_control(model, solver_spec,
                                      {.gamma = c.gamma, .tol = c.epsilon, .max_iter = budget, .observer = record});
        curve.final_policy = std::move(res.policy);
        curve.value = std::move(res.value);
        curve.gain = (1.0 - c.gamma) * mean(curve.value);
        curve.report = std::move(res.report);
    }

    const std::size_t last = curve.report.iterations;
    const double final_ms = ms_since(start) - extraction_ms;
    // padded curves stay on the sampling grid so that seeds line up
    if (points.back().t != last && (!pad_to_budget || last == budget)) {
        points.push_back({last, curve.final_policy, final_ms});
    }
    if (pad_to_budget) {
        for (std::size_t t = (last / c.report_every + 1) * c.report_every; t <= budget; t += c.report_every) {
            points.push_back({t, curve.final_policy, final_ms});
        }
        if (points.back().t != budget) points.push_back({budget, curve.final_policy, final_ms});
    }

    for (const auto& p : points) {
        curve.rows.push_back({seed, p.t, method, c.kind, row_radius(c), scorer(p.policy, c.eval_T), p.elapsed_ms});
    }
    curve.final_reward = scorer(curve.final_policy, c.final_eval_T);
    return curve;
}

SolveOutcome solve(const MdpModel& model, const RunConfig& c, Method method, std::uint64_t seed) {
    const auto spec = make_spec(c, model.n_states(), model.n_actions());
    PolicyScorer scorer(model, spec, c.evaluator);
    const auto start = Clock::now();
    auto curve = run_curve(model, c, method, seed, scorer, solver_default_budget(method), false);
    const double elapsed = ms_since(start);

    json residuals;
    residuals["solver"] = curve.report.residual;
    if (is_rvi(method)) {
        const auto solver_spec = is_robust(method) ? spec : UncertaintySpec::nominal();
        residuals["optimality"] = optimality_residual(model, solver_spec, curve.gain, curve.value);
    }
    auto warnings = curve.report.warnings;
    for (auto& w : positivity_warnings(model, spec)) {
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(std::move(w));
    }

    json report;
    report["method"] = to_string(method);
    report["kind"] = to_string(c.kind);
    report["radius"] = radius_json(c);
    report["interior_smoothing"] = c.interior_smoothing;
    report["seed"] = seed;
    report["fingerprint"] = fingerprint(model);
    report["n_states"] = model.n_states();
    report["n_actions"] = model.n_actions();
    report["iterations"] = curve.report.iterations;
    report["converged"] = curve.report.converged;
    report["final_difference"] = curve.report.final_difference;
    report["error_bound"] = curve.report.error_bound;
    report["residuals"] = residuals;
    report["warnings"] = warnings;
    report["gain"] = curve.gain;
    report["value"] = curve.value;
    report["policy"] = to_json(curve.final_policy);
    report["robust_avg_reward"] = curve.final_reward;
    report["evaluator"] = to_string(c.evaluator);
    report["eval_T"] = c.final_eval_T;
    if (c.timing) report["elapsed_ms"] = elapsed;
    return {std::move(report), std::move(curve.rows), curve.report.converged};
}

CompareOutcome compare(const RunConfig& c) {
    if (c.methods.size() < 2) throw InvalidInput("compare needs at least two methods");
    struct SeedResult {
        std::vector<Curve> curves;
        std::string fingerprint;
    };
    std::vector<SeedResult> results(c.seeds.size());
    parallel_for(c.seeds.size(), c.jobs, [&](std::size_t i) {
        const auto model = make_instance(c, c.seeds[i]);
        const auto spec = make_spec(c, model.n_states(), model.n_actions());
        PolicyScorer scorer(model, spec, c.evaluator);
        results[i].fingerprint = fingerprint(model);
        for (Method m : c.methods) results[i].curves.push_back(run_curve(model, c, m, c.seeds[i], scorer, 200));
    });

    CompareOutcome out;
    json seeds = json::array();
    json ordering = json::array();
    const std::pair<Method, Method> pairs[] = {{Method::RobustViLimit, Method::NonrobustVi},
                                               {Method::RobustRvi, Method::NonrobustRvi},
                                               {Method::RobustDvi, Method::NonrobustVi}};
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
        json per_method;
        std::map<Method, double> finals;
        for (const auto& curve : results[i].curves) {
            out.rows.insert(out.rows.end(), curve.rows.begin(), curve.rows.end());
            finals[curve.method] = curve.final_reward;
            json m;
            m["final_robust_avg_reward"] = curve.final_reward;
            m["final_policy"] = curve.final_policy.actions();
            m["iterations"] = curve.report.iterations;
            m["converged"] = curve.report.converged;
            per_method[to_string(curve.method)] = m;
        }
        seeds.push_back({{"seed", c.seeds[i]}, {"fingerprint", results[i].fingerprint}, {"methods", per_method}});
        for (const auto& [robust, nominal] : pairs) {
            if (!finals.contains(robust) || !finals.contains(nominal)) continue;
            const bool holds = finals[robust] >= finals[nominal] - 1e-6;
            out.ordering_holds = out.ordering_holds && holds;
            ordering.push_back({{"seed", c.seeds[i]},
                                {"robust", to_string(robust)},
                                {"nonrobust", to_string(nominal)},
                                {"robust_value", finals[robust]},
                                {"nonrobust_value", finals[nominal]},
                                {"holds", holds}});
        }
    }
    sort_rows(out.rows, c.methods);

    json mean_curves;
    for (Method m : c.methods) {
        std::map<std::size_t, std::pair<double, std::size_t>> acc;
        for (const auto& r : out.rows) {
            if (r.method != m) continue;
            auto& [sum, n] = acc[r.t];
            sum += r.robust_avg_reward;
            ++n;
        }
        json points = json::array();
        for (const auto& [t, sn] : acc) {
            if (sn.second == c.seeds.size()) points.push_back({t, sn.first / static_cast<double>(sn.second)});
        }
        mean_curves[to_string(m)] = points;
    }

    out.summary["config"] = to_json(c);
    out.summary["seeds"] = seeds;
    out.summary["ordering"] = ordering;
    out.summary["ordering_holds"] = out.ordering_holds;
    out.summary["mean_curves"] = mean_curves;
    return out;
}

std::string compare_stem(const RunConfig& c) {
    std::string stem = "compare-" + to_string(c.kind) + "-R" + format_number(row_radius(c));
    if (c.radii) stem += "-pairwise";
    return stem;
}

void write_compare_outputs(const CompareOutcome& outcome, const RunConfig& c, const std::string& stem) {
    const auto dir = ensure_directory(c.out_dir);
    auto open = [&](const std::string& ext) {
        std::ofstream f(dir / (stem + ext), std::ios::binary);
        if (!f) throw InvalidInput("cannot write " + (dir / (stem + ext)).string());
        return f;
    };
    {
        auto f = open(".csv");
        write_csv(f, outcome.rows, c.timing);
    }
    {
        auto f = open(".svg");
        f << render_svg(outcome.rows, c.methods, to_string(c.kind) + " R=" + format_number(row_radius(c)));
    }
    {
        auto f = open(".json");
        f << outcome.summary.dump(2) << '\n';
    }
}

} // namespace rmdp::bench
