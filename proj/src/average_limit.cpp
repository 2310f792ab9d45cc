#include "rmdp/average_limit.hpp"

#include <chrono>

namespace rmdp {

double gamma_schedule(std::size_t t, double c) {
    if (!(c > 0.0 && c <= 2.0)) throw InvalidInput("schedule constant must lie in (0,2]");
    return 1.0 - c / (static_cast<double>(t) + 2.0);
}

namespace {

template <typename Step>
Vector run_schedule(std::size_t n_states, const LimitSolveParams& params, Step&& step,
                    SolveReport& report) {
    if (params.T == 0) throw InvalidInput("iteration budget T must be at least 1");
    gamma_schedule(0, params.schedule_c); // validates c
    const auto start = std::chrono::steady_clock::now();
    report.trace_stride = std::max<std::size_t>(1, params.report_every);
    Vector v(n_states, 0.0);
    for (std::size_t t = 0; t < params.T; ++t) {
        const double gamma = gamma_schedule(t, params.schedule_c);
        Vector next = step(v, gamma);
        const double diff = max_abs_diff(next, v);
        v = std::move(next);
        report.final_difference = diff;
        if ((t + 1) % report.trace_stride == 0) report.trace.push_back(diff);
        if (params.observer) params.observer(t + 1, v);
    }
    report.iterations = params.T;
    report.converged = true; // fixed budget
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return v;
}

} // namespace

LimitEvaluation robust_avg_eval_limit(const MdpModel& model, const UncertaintySpec& spec,
                                      const Policy& policy, const LimitSolveParams& params) {
    check_dimensions(model, spec, policy);
    LimitEvaluation out;
    out.value = run_schedule(
        model.n_states(), params,
        [&](const Vector& v, double gamma) {
            return robust_policy_backup(model, spec, policy, v, 1.0 - gamma, gamma);
        },
        out.report);
    return out;
}

Policy limit_greedy_policy(const MdpModel& model, const UncertaintySpec& spec,
                           std::span<const double> v, double gamma) {
    return greedy_policy(robust_q_values(model, spec, v, 1.0 - gamma, gamma));
}

LimitControl robust_avg_control_limit(const MdpModel& model, const UncertaintySpec& spec,
                                      const LimitSolveParams& params) {
    check_dimensions(model, spec);
    LimitControl out;
    out.value = run_schedule(
        model.n_states(), params,
        [&](const Vector& v, double gamma) {
            return robust_max_backup(model, spec, v, 1.0 - gamma, gamma);
        },
        out.report);
    out.policy = limit_greedy_policy(model, spec, out.value, gamma_schedule(params.T - 1, params.schedule_c));
    return out;
}

BlackwellProbe blackwell_probe(const MdpModel& model, const UncertaintySpec& spec,
                               const std::vector<double>& gamma_grid, DiscountedSolveParams base) {
    if (gamma_grid.empty()) throw InvalidInput("blackwell_probe: empty discount grid");
    BlackwellProbe probe;
    Vector previous;
    double previous_gamma = 0.0;
    for (double gamma : gamma_grid) {
        DiscountedSolveParams params = base;
        params.gamma = gamma;
        if (!previous.empty()) {
            params.initial = previous;
            const double scale = (1.0 - previous_gamma) / (1.0 - gamma);
            for (double& x : params.initial) x *= scale;
        }
        auto solved = robust_dvi_control(model, spec, params);
        probe.policies.emplace_back(gamma, solved.policy);
        previous = std::move(solved.value);
        previous_gamma = gamma;
    }
    probe.stable_from = probe.policies.size() - 1;
    while (probe.stable_from > 0 &&
           probe.policies[probe.stable_from - 1].second == probe.policies.back().second) {
        --probe.stable_from;
    }
    return probe;
}

} // namespace rmdp
