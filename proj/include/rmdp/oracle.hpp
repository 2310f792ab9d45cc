#pragma once

// Brute-force reference computations. Everything here is deliberately slow and
// independent of the solver code paths it is used to check.

#include <functional>
#include <span>
#include <vector>

#include "rmdp/core.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp::oracle {

/// Minimum of q·v over simplex grid points inside the set. Grids are refined around the
/// incumbent (re-centering until it stops moving) down to `resolution`; the nominal row is
/// always a candidate. Refuses more than 4 states.
double oracle_support(SetKind kind, std::span<const double> p, std::span<const double> v,
                      double radius, double resolution);

/// Exact TV support by enumerating basic feasible solutions of the lifted LP
/// min q·v s.t. Σq = 1, q ≥ 0, t ≥ |q - p|, Σt ≤ 2R.
double tv_vertex_enumeration(std::span<const double> p, std::span<const double> v, double radius);

/// Two-state KL support: bisection for the boundary point of {q : KL(q‖p) ≤ R} on the
/// side of the lower value.
double kl_two_state_bisection(std::span<const double> p, std::span<const double> v, double radius);

/// The TV dual as printed, p·v - R min_{μ≥0} sp(v - μ), minimized over a grid of μ.
double tv_printed_dual(std::span<const double> p, std::span<const double> v, double radius,
                       double mu_max, double mu_step);
/// max_{μ≥0} { p·(v - μ) - R·sp(v - μ) } over a grid of μ.
double tv_shifted_dual(std::span<const double> p, std::span<const double> v, double radius,
                       double mu_max, double mu_step);

/// Calls `visit` with every deterministic policy, actions in mixed-radix order.
void for_each_deterministic_policy(std::size_t n_states, std::size_t n_actions,
                                   const std::function<void(const Policy&)>& visit);

struct EnumerationResult {
    Policy best;
    double best_score = 0.0;
    /// Score gap to the runner-up (infinity with a single policy).
    double gap = 0.0;
};

/// argmax of `score` over all deterministic policies (first in enumeration order on ties).
EnumerationResult best_deterministic_policy(std::size_t n_states, std::size_t n_actions,
                                            const std::function<double(const Policy&)>& score);

/// Robust average reward of a policy scored through a frozen kernel: robust RVI bias ->
/// worst-case kernel -> exact non-robust gain.
double worst_kernel_gain(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy);

/// Σ_{t<horizon} γ^t (P^π)^t r_π by repeated multiplication.
Vector truncated_discounted_value(const Matrix& transition, std::span<const double> reward,
                                  double gamma, std::size_t horizon);

/// Cesàro-averaged partial sums (1/n) Σ_{k=1}^{n} Σ_{t<k} (P^t r - g), a bias estimate.
Vector cesaro_bias(const Matrix& transition, std::span<const double> reward, double gain,
                   std::size_t n);

} // namespace rmdp::oracle
