#pragma once

#include <string>
#include <vector>

#include "rmdp/bellman.hpp"
#include "rmdp/report.hpp"

namespace rmdp {

struct RviParams {
    /// Stop once span(w_{t+1} - w_t) < epsilon.
    double epsilon = 1e-8;
    std::size_t ref_state = 0;
    std::size_t max_iter = 1'000'000;
    /// V_0; empty means zero.
    Vector initial;
    std::size_t trace_stride = 1;
    IterationObserver observer;
};

struct RviSolution {
    GainBias solution; ///< gain (state-constant) and relative value w
    double gain = 0.0;
    Policy policy; ///< greedy policy (control) or the evaluated policy (evaluation)
    SolveReport report;
};

/// L v(s) = max_a (r(s,a) + σ(v)).
Vector rvi_op_control(const MdpModel& model, const UncertaintySpec& spec, std::span<const double> w);
/// L_π v(s) = Σ_a π(a|s)(r(s,a) + σ(v)).
Vector rvi_op_eval(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                   std::span<const double> w);

/// Robust relative value iteration for the optimality equation.
RviSolution robust_rvi_control(const MdpModel& model, const UncertaintySpec& spec,
                               const RviParams& params = {});
/// Robust relative value iteration for the policy Bellman equation.
RviSolution robust_rvi_eval(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                            const RviParams& params = {});

/// Greedy policy argmax_a { r(s,a) + σ(w) }.
Policy rvi_greedy_policy(const MdpModel& model, const UncertaintySpec& spec, std::span<const double> w);

/// max_s | max_a { r(s,a) - g + σ(v) - v(s) } |.
double optimality_residual(const MdpModel& model, const UncertaintySpec& spec, double gain,
                           std::span<const double> v);
/// max_s | Σ_a π(a|s)(r(s,a) + σ(v)) - g - v(s) |.
double bellman_residual_eval(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                             double gain, std::span<const double> v);

/// Reasons the set may contain kernels with zero entries, which voids the
/// strict-positivity half of the unichain assumption RVI convergence relies on.
std::vector<std::string> positivity_warnings(const MdpModel& model, const UncertaintySpec& spec);

struct StationaryEquivalence {
    double robust_gain = 0.0;
    double stationary_gain = 0.0;
    double difference = 0.0;
    bool passed = false;
    Kernel worst;
};

/// Freezes the worst-case kernel at the robust bias and compares its non-robust gain with
/// the robust gain. Passes when the difference is at most `tolerance`.
StationaryEquivalence check_stationary_equivalence(const MdpModel& model, const UncertaintySpec& spec,
                                                   const Policy& policy, const RviParams& params = {},
                                                   double tolerance = 1e-5);

} // namespace rmdp
