#include "rmdp/discounted.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace rmdp {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw InvalidInput("discount factor must lie in [0,1), got " + std::to_string(gamma));
    }
}

template <typename Step>
Vector iterate_to_tolerance(std::size_t n_states, const DiscountedSolveParams& params, Step&& step,
                            SolveReport& report) {
    if (!(params.tol > 0.0)) throw InvalidInput("tolerance must be positive");
    if (!params.initial.empty() && params.initial.size() != n_states) {
        throw InvalidInput("warm start has the wrong length");
    }
    const auto start = std::chrono::steady_clock::now();
    Vector v = params.initial.empty() ? Vector(n_states, 0.0) : params.initial;
    report.trace_stride = std::max<std::size_t>(1, params.trace_stride);
    for (std::size_t t = 0; t < params.max_iter; ++t) {
        Vector next = step(v);
        const double diff = max_abs_diff(next, v);
        v = std::move(next);
        report.iterations = t + 1;
        report.final_difference = diff;
        if ((t + 1) % report.trace_stride == 0) report.trace.push_back(diff);
        if (params.observer) params.observer(t + 1, v);
        if (diff < params.tol) {
            report.converged = true;
            break;
        }
    }
    report.error_bound = params.gamma * report.final_difference / (1.0 - params.gamma);
    if (!report.converged) {
        report.warnings.push_back("no convergence within " + std::to_string(params.max_iter) +
                                  " iterations");
    }
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return v;
}

} // namespace

Vector bellman_eval_op(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                       double gamma, std::span<const double> v) {
    check_gamma(gamma);
    check_dimensions(model, spec, policy);
    return robust_policy_backup(model, spec, policy, v, 1.0, gamma);
}

Vector bellman_ctrl_op(const MdpModel& model, const UncertaintySpec& spec, double gamma,
                       std::span<const double> v) {
    check_gamma(gamma);
    check_dimensions(model, spec);
    return robust_max_backup(model, spec, v, 1.0, gamma);
}

DiscountedEvaluation robust_dvi_eval(const MdpModel& model, const UncertaintySpec& spec,
                                     const Policy& policy, const DiscountedSolveParams& params) {
    check_gamma(params.gamma);
    check_dimensions(model, spec, policy);
    DiscountedEvaluation out;
    out.value = iterate_to_tolerance(
        model.n_states(), params,
        [&](const Vector& v) { return robust_policy_backup(model, spec, policy, v, 1.0, params.gamma); },
        out.report);
    out.report.residual =
        max_abs_diff(robust_policy_backup(model, spec, policy, out.value, 1.0, params.gamma), out.value);
    return out;
}

DiscountedControl robust_dvi_control(const MdpModel& model, const UncertaintySpec& spec,
                                     const DiscountedSolveParams& params) {
    check_gamma(params.gamma);
    check_dimensions(model, spec);
    DiscountedControl out;
    out.value = iterate_to_tolerance(
        model.n_states(), params,
        [&](const Vector& v) { return robust_max_backup(model, spec, v, 1.0, params.gamma); },
        out.report);
    const Matrix q = robust_q_values(model, spec, out.value, 1.0, params.gamma);
    out.policy = greedy_policy(q);
    double residual = 0.0;
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        auto row = q.row(s);
        residual = std::max(residual, std::abs(*std::max_element(row.begin(), row.end()) - out.value[s]));
    }
    out.report.residual = residual;
    return out;
}

} // namespace rmdp
