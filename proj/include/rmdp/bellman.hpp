#pragma once

#include <span>

#include "rmdp/core.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

/// q(s,a) = reward_weight·r(s,a) + value_weight·σ_{P(s,a)}(v).
Matrix robust_q_values(const MdpModel& model, const UncertaintySpec& spec,
                       std::span<const double> v, double reward_weight, double value_weight);

/// Policy-weighted one-step backup: Σ_a π(a|s)(reward_weight·r + value_weight·σ(v)).
Vector robust_policy_backup(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                            std::span<const double> v, double reward_weight, double value_weight);

/// Max-over-actions backup with the same weights.
Vector robust_max_backup(const MdpModel& model, const UncertaintySpec& spec,
                         std::span<const double> v, double reward_weight, double value_weight);

void check_dimensions(const MdpModel& model, const UncertaintySpec& spec);
void check_dimensions(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy);

} // namespace rmdp
