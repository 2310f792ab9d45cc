#pragma once

#include "rmdp/bellman.hpp"
#include "rmdp/report.hpp"

namespace rmdp {

struct DiscountedSolveParams {
    double gamma = 0.9;
    /// Stop once ‖V_{t+1} - V_t‖_∞ < tol.
    double tol = 1e-10;
    std::size_t max_iter = 10'000'000;
    /// Warm start; empty means the zero vector.
    Vector initial;
    std::size_t trace_stride = 1;
    IterationObserver observer;
};

/// T_π v(s) = Σ_a π(a|s)(r(s,a) + γ σ(v)).
Vector bellman_eval_op(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                       double gamma, std::span<const double> v);
/// T v(s) = max_a (r(s,a) + γ σ(v)).
Vector bellman_ctrl_op(const MdpModel& model, const UncertaintySpec& spec, double gamma,
                       std::span<const double> v);

struct DiscountedEvaluation {
    Vector value;
    SolveReport report;
};

struct DiscountedControl {
    Vector value;
    Policy policy;
    SolveReport report;
};

DiscountedEvaluation robust_dvi_eval(const MdpModel& model, const UncertaintySpec& spec,
                                     const Policy& policy, const DiscountedSolveParams& params);
DiscountedControl robust_dvi_control(const MdpModel& model, const UncertaintySpec& spec,
                                     const DiscountedSolveParams& params);

} // namespace rmdp
