#include "rmdp/bellman.hpp"

#include <algorithm>
#include <limits>

namespace rmdp {

void check_dimensions(const MdpModel& model, const UncertaintySpec& spec) {
    if (model.rewards.rows() != model.n_states() || model.rewards.cols() != model.n_actions()) {
        throw InvalidInput("reward matrix shape does not match kernel");
    }
    spec.check_shape(model.n_states(), model.n_actions());
}

void check_dimensions(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy) {
    check_dimensions(model, spec);
    if (policy.n_states() != model.n_states() || policy.n_actions() != model.n_actions()) {
        throw InvalidInput("policy shape does not match the model");
    }
}

Matrix robust_q_values(const MdpModel& model, const UncertaintySpec& spec,
                       std::span<const double> v, double reward_weight, double value_weight) {
    SupportEvaluator eval(spec, v);
    Matrix q(model.n_states(), model.n_actions());
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            q(s, a) = reward_weight * model.rewards(s, a) +
                      value_weight * eval.value(s, a, model.kernel.row(s, a));
        }
    }
    return q;
}

Vector robust_policy_backup(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                            std::span<const double> v, double reward_weight, double value_weight) {
    SupportEvaluator eval(spec, v);
    Vector out(model.n_states(), 0.0);
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        double acc = 0.0;
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            const double w = policy(s, a);
            if (w == 0.0) continue;
            acc += w * (reward_weight * model.rewards(s, a) +
                        value_weight * eval.value(s, a, model.kernel.row(s, a)));
        }
        out[s] = acc;
    }
    return out;
}

Vector robust_max_backup(const MdpModel& model, const UncertaintySpec& spec,
                         std::span<const double> v, double reward_weight, double value_weight) {
    SupportEvaluator eval(spec, v);
    Vector out(model.n_states());
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            best = std::max(best, reward_weight * model.rewards(s, a) +
                                      value_weight * eval.value(s, a, model.kernel.row(s, a)));
        }
        out[s] = best;
    }
    return out;
}

} // namespace rmdp
