#pragma once

#include <utility>
#include <vector>

#include "rmdp/discounted.hpp"
#include "rmdp/report.hpp"

namespace rmdp {

/// Discount factor used at step t: 1 - c/(t+2). The default c = 1 gives (t+1)/(t+2).
double gamma_schedule(std::size_t t, double c = 1.0);

struct LimitSolveParams {
    /// Fixed iteration budget; there is no tolerance stop because the operator
    /// changes every step.
    std::size_t T = 10'000;
    /// Sampling stride of the successive-difference trace.
    std::size_t report_every = 1;
    /// Schedule constant c in γ_t = 1 - c/(t+2), c ∈ (0,2].
    double schedule_c = 1.0;
    IterationObserver observer;
};

struct LimitEvaluation {
    Vector value; ///< V_T, an estimate of the robust average reward per state
    SolveReport report;
};

struct LimitControl {
    Vector value;
    Policy policy;
    SolveReport report;
};

/// V_{t+1}(s) = E_π[(1-γ_t) r(s,A) + γ_t σ(V_t)], V_0 = 0.
LimitEvaluation robust_avg_eval_limit(const MdpModel& model, const UncertaintySpec& spec,
                                      const Policy& policy, const LimitSolveParams& params = {});

/// V_{t+1}(s) = max_a {(1-γ_t) r(s,a) + γ_t σ(V_t)}, then a greedy policy from V_T
/// using the last schedule value γ_{T-1}.
LimitControl robust_avg_control_limit(const MdpModel& model, const UncertaintySpec& spec,
                                      const LimitSolveParams& params = {});

/// Greedy policy of the limit iteration for an arbitrary iterate and discount.
Policy limit_greedy_policy(const MdpModel& model, const UncertaintySpec& spec,
                           std::span<const double> v, double gamma);

struct BlackwellProbe {
    std::vector<std::pair<double, Policy>> policies;
    /// First grid index from which the greedy policy never changes.
    std::size_t stable_from = 0;
    bool constant() const { return stable_from == 0; }
    const Policy& tail_policy() const { return policies.back().second; }
};

/// Robust discounted optimal control at each discount in `gamma_grid`. Successive
/// solves are warm-started from the previous value rescaled by (1-γ_prev)/(1-γ).
BlackwellProbe blackwell_probe(const MdpModel& model, const UncertaintySpec& spec,
                               const std::vector<double>& gamma_grid,
                               DiscountedSolveParams base = {});

} // namespace rmdp
