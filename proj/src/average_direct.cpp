#include "rmdp/average_direct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rmdp/chain.hpp"

namespace rmdp {

namespace {

template <typename Op>
RviSolution relative_iteration(const MdpModel& model, const RviParams& params, Op&& apply) {
    const std::size_t n = model.n_states();
    if (!(params.epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    if (params.ref_state >= n) throw InvalidInput("reference state out of range");
    if (!params.initial.empty() && params.initial.size() != n) {
        throw InvalidInput("initial value has the wrong length");
    }
    const auto start = std::chrono::steady_clock::now();
    RviSolution out;
    out.report.trace_stride = std::max<std::size_t>(1, params.trace_stride);

    Vector w = params.initial.empty() ? Vector(n, 0.0) : params.initial;
    const double w_ref = w[params.ref_state];
    for (double& x : w) x -= w_ref;

    double gain = 0.0;
    Vector diff(n);
    for (std::size_t t = 0; t < params.max_iter; ++t) {
        Vector v = apply(w);
        gain = v[params.ref_state];
        for (std::size_t s = 0; s < n; ++s) {
            v[s] -= gain;
            diff[s] = v[s] - w[s];
        }
        w = std::move(v);
        const double sp = span(diff);
        out.report.iterations = t + 1;
        out.report.final_difference = sp;
        if ((t + 1) % out.report.trace_stride == 0) out.report.trace.push_back(sp);
        if (params.observer) params.observer(t + 1, w);
        if (!std::isfinite(sp)) break;
        if (sp < params.epsilon) {
            out.report.converged = true;
            break;
        }
    }
    if (!out.report.converged) {
        out.report.warnings.push_back("span of successive differences " +
                                      std::to_string(out.report.final_difference) +
                                      " did not fall below epsilon within " +
                                      std::to_string(params.max_iter) + " iterations");
    }
    out.gain = gain;
    out.solution = GainBias{Vector(n, gain), std::move(w)};
    out.report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace

Vector rvi_op_control(const MdpModel& model, const UncertaintySpec& spec, std::span<const double> w) {
    check_dimensions(model, spec);
    return robust_max_backup(model, spec, w, 1.0, 1.0);
}

Vector rvi_op_eval(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                   std::span<const double> w) {
    check_dimensions(model, spec, policy);
    return robust_policy_backup(model, spec, policy, w, 1.0, 1.0);
}

Policy rvi_greedy_policy(const MdpModel& model, const UncertaintySpec& spec, std::span<const double> w) {
    return greedy_policy(robust_q_values(model, spec, w, 1.0, 1.0));
}

RviSolution robust_rvi_control(const MdpModel& model, const UncertaintySpec& spec,
                               const RviParams& params) {
    check_dimensions(model, spec);
    auto out = relative_iteration(model, params, [&](const Vector& w) {
        return robust_max_backup(model, spec, w, 1.0, 1.0);
    });
    auto warnings = positivity_warnings(model, spec);
    out.report.warnings.insert(out.report.warnings.begin(), warnings.begin(), warnings.end());
    out.policy = rvi_greedy_policy(model, spec, out.solution.bias);
    out.report.residual = optimality_residual(model, spec, out.gain, out.solution.bias);
    return out;
}

RviSolution robust_rvi_eval(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                            const RviParams& params) {
    check_dimensions(model, spec, policy);
    auto out = relative_iteration(model, params, [&](const Vector& w) {
        return robust_policy_backup(model, spec, policy, w, 1.0, 1.0);
    });
    auto warnings = positivity_warnings(model, spec);
    out.report.warnings.insert(out.report.warnings.begin(), warnings.begin(), warnings.end());
    out.policy = policy;
    out.report.residual = bellman_residual_eval(model, spec, policy, out.gain, out.solution.bias);
    return out;
}

double optimality_residual(const MdpModel& model, const UncertaintySpec& spec, double gain,
                           std::span<const double> v) {
    check_dimensions(model, spec);
    const Vector lv = robust_max_backup(model, spec, v, 1.0, 1.0);
    double worst = 0.0;
    for (std::size_t s = 0; s < lv.size(); ++s) worst = std::max(worst, std::abs(lv[s] - gain - v[s]));
    return worst;
}

double bellman_residual_eval(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                             double gain, std::span<const double> v) {
    check_dimensions(model, spec, policy);
    const Vector lv = robust_policy_backup(model, spec, policy, v, 1.0, 1.0);
    double worst = 0.0;
    for (std::size_t s = 0; s < lv.size(); ++s) worst = std::max(worst, std::abs(lv[s] - gain - v[s]));
    return worst;
}

std::vector<std::string> positivity_warnings(const MdpModel& model, const UncertaintySpec& spec) {
    std::vector<std::string> out;
    // every candidate row is mixed with uniform, hence strictly positive
    if (spec.interior_smoothing() > 0.0) return out;
    std::size_t zero_rows = 0;
    std::size_t open_rows = 0;
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            auto row = model.kernel.row(s, a);
            const double pmin = *std::min_element(row.begin(), row.end());
            if (pmin <= 0.0) {
                ++zero_rows;
                continue;
            }
            const double r = spec.radius(s, a);
            bool reaches_zero = false;
            switch (spec.kind()) {
            case SetKind::Contamination:
                reaches_zero = r >= 1.0;
                break;
            case SetKind::TotalVariation:
                reaches_zero = r >= pmin;
                break;
            case SetKind::KL:
                // dropping state i costs KL = -log(1 - p_i)
                reaches_zero = row.size() > 1 && r >= -std::log1p(-pmin);
                break;
            }
            if (reaches_zero) ++open_rows;
        }
    }
    if (zero_rows > 0) {
        out.push_back(std::to_string(zero_rows) + " nominal kernel rows have zero entries");
    }
    if (open_rows > 0) {
        out.push_back(std::to_string(open_rows) +
                      " uncertainty sets contain kernels with zero entries");
    }
    return out;
}

StationaryEquivalence check_stationary_equivalence(const MdpModel& model, const UncertaintySpec& spec,
                                                   const Policy& policy, const RviParams& params,
                                                   double tolerance) {
    const auto robust = robust_rvi_eval(model, spec, policy, params);
    StationaryEquivalence out;
    out.robust_gain = robust.gain;
    out.worst = worst_kernel(model, spec, robust.solution.bias);
    out.stationary_gain = gain_and_bias(model, out.worst, policy).gain.front();
    out.difference = std::abs(out.stationary_gain - out.robust_gain);
    out.passed = out.difference <= tolerance;
    return out;
}

} // namespace rmdp
