#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rmdp/average_direct.hpp"
#include "rmdp/average_limit.hpp"
#include "rmdp/bench.hpp"
#include "rmdp/chain.hpp"
#include "rmdp/discounted.hpp"
#include "rmdp/oracle.hpp"

namespace rmdp::bench {

using nlohmann::json;

namespace {

SupportResult raw_support(SetKind kind, std::span<const double> p, std::span<const double> v, double radius) {
    switch (kind) {
    case SetKind::Contamination:
        return support_contamination(p, v, radius);
    case SetKind::TotalVariation:
        return support_tv(p, v, radius);
    case SetKind::KL:
        return support_kl(p, v, radius);
    }
    throw InvalidInput("unknown set kind");
}

Vector uniform_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (double& x : v) x = u(rng);
    return v;
}

Vector simplex_point(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    Vector p(n);
    for (double& x : p) x = e(rng);
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= sum;
    return p;
}

double max_radius(const UncertaintySpec& spec, std::size_t n_states, std::size_t n_actions) {
    double r = 0.0;
    for (std::size_t s = 0; s < n_states; ++s) {
        for (std::size_t a = 0; a < n_actions; ++a) r = std::max(r, spec.radius(s, a));
    }
    return r;
}

} // namespace

bool CheckReport::passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const Property& p) { return p.passed; });
}

json CheckReport::to_json() const {
    json props = json::array();
    for (const auto& p : properties) {
        json j{{"name", p.name}, {"measured", p.measured}, {"tolerance", p.tolerance}, {"passed", p.passed}};
        if (!p.note.empty()) j["note"] = p.note;
        props.push_back(j);
    }
    return {{"passed", passed()}, {"properties", props}, {"warnings", warnings}};
}

CheckReport run_check(const MdpModel& model, const UncertaintySpec& spec, std::uint64_t seed) {
    CheckReport report;
    auto add = [&](std::string name, double measured, double tolerance, std::string note = {}) {
        const bool ok = std::isfinite(measured) && measured <= tolerance;
        report.properties.push_back({std::move(name), measured, tolerance, ok, std::move(note)});
    };

    const auto violations = validate_model(model);
    add("model.valid", static_cast<double>(violations.size()), 0.0,
        violations.empty() ? "" : describe(violations.front()));
    if (!violations.empty()) return report;
    spec.check_shape(model.n_states(), model.n_actions());

    const std::size_t n = model.n_states();
    const std::size_t m = model.n_actions();
    const SetKind kind = spec.kind();
    std::mt19937_64 rng(seed);

    // support function against the grid oracle: the model's own rows when small enough,
    // random 3-state rows at the model's radius otherwise
    {
        double worst = 0.0;
        const double tol = kind == SetKind::KL ? 1e-3 : 1e-4;
        if (n <= 4) {
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t a = 0; a < m; ++a) {
                    auto v = uniform_vector(rng, n, 0.0, 1.0);
                    auto p = model.kernel.row(s, a);
                    const double r = spec.radius(s, a);
                    worst = std::max(worst, std::abs(raw_support(kind, p, v, r).value -
                                                     oracle::oracle_support(kind, p, v, r, 1e-5)));
                }
            }
        } else {
            const double r = max_radius(spec, n, m);
            for (int trial = 0; trial < 30; ++trial) {
                auto p = simplex_point(rng, 3);
                auto v = uniform_vector(rng, 3, 0.0, 1.0);
                worst = std::max(worst, std::abs(raw_support(kind, p, v, r).value -
                                                 oracle::oracle_support(kind, p, v, r, 1e-5)));
            }
        }
        add("support.oracle_agreement", worst, tol);
    }

    // minimizers are members of the set and attain the value
    {
        double defect = 0.0;
        double gap = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            auto v = uniform_vector(rng, n, -1.0, 1.0);
            for (std::size_t s = 0; s < n; ++s) {
                for (std::size_t a = 0; a < m; ++a) {
                    auto p = model.kernel.row(s, a);
                    auto res = raw_support(kind, p, v, spec.radius(s, a));
                    defect = std::max(defect, membership_defect(kind, p, res.minimizer, spec.radius(s, a)));
                    gap = std::max(gap, std::abs(dot(res.minimizer, v) - res.value));
                }
            }
        }
        add("support.minimizer_feasible", defect, 1e-8);
        add("support.minimizer_attains_value", gap, 1e-8);
    }

    {
        const double gamma = 0.9;
        double excess = -std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 100; ++trial) {
            auto v = uniform_vector(rng, n, -5.0, 5.0);
            auto w = uniform_vector(rng, n, -5.0, 5.0);
            const double lhs = max_abs_diff(bellman_ctrl_op(model, spec, gamma, v), bellman_ctrl_op(model, spec, gamma, w));
            excess = std::max(excess, lhs - gamma * max_abs_diff(v, w));
        }
        add("discounted.contraction_excess", excess, 1e-12);
    }

    const auto rvi = robust_rvi_control(model, spec, {.epsilon = 1e-10});
    add("rvi.converged", rvi.report.converged ? 0.0 : 1.0, 0.0,
        "iterations " + std::to_string(rvi.report.iterations));
    add("rvi.optimality_residual", optimality_residual(model, spec, rvi.gain, rvi.solution.bias), 1e-6);

    const auto limit = robust_avg_control_limit(model, spec);
    {
        double gap = 0.0;
        for (double v : limit.value) gap = std::max(gap, std::abs(v - rvi.gain));
        add("limit.value_vs_rvi_gain", gap, 1e-2);
        const double limit_gain = robust_rvi_eval(model, spec, limit.policy, {.epsilon = 1e-10}).gain;
        add("limit.policy_gain_gap", rvi.gain - limit_gain, 1e-4,
            limit.policy == rvi.policy ? "same policy as rvi" : "policy differs from rvi");
    }

    const auto eq = check_stationary_equivalence(model, spec, rvi.policy, {.epsilon = 1e-10});
    add("stationary_equivalence", eq.difference, 1e-5);

    try {
        const double nominal = gain_and_bias(model, model.kernel, rvi.policy).gain[0];
        add("robust_gain_below_nominal", rvi.gain - nominal, 1e-6);
        if (max_radius(spec, n, m) == 0.0 && spec.interior_smoothing() == 0.0) {
            add("nominal.robust_equals_nonrobust", std::abs(rvi.gain - nominal), 1e-6);
        }
    } catch (const NonUnichainError& e) {
        add("robust_gain_below_nominal", std::numeric_limits<double>::infinity(), 1e-6, e.what());
    }

    {
        const auto probe = blackwell_probe(model, spec, {0.9, 0.99, 0.999}, {.tol = 1e-9});
        const double tail_gain = robust_rvi_eval(model, spec, probe.tail_policy(), {.epsilon = 1e-10}).gain;
        add("blackwell.tail_policy_gain_gap", rvi.gain - tail_gain, 1e-4,
            "stable from grid index " + std::to_string(probe.stable_from));
    }

    report.warnings = positivity_warnings(model, spec);
    for (const auto& w : rvi.report.warnings) {
        if (std::find(report.warnings.begin(), report.warnings.end(), w) == report.warnings.end()) {
            report.warnings.push_back(w);
        }
    }
    return report;
}

} // namespace rmdp::bench
