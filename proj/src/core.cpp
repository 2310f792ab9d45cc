#include "rmdp/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rmdp {

Policy Policy::deterministic(std::span<const std::size_t> actions, std::size_t n_actions) {
    Matrix probs(actions.size(), n_actions);
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] >= n_actions) {
            throw InvalidInput("policy action index out of range at state " + std::to_string(s));
        }
        probs(s, actions[s]) = 1.0;
    }
    return Policy(std::move(probs));
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
    return Policy(Matrix(n_states, n_actions, 1.0 / static_cast<double>(n_actions)));
}

bool Policy::is_deterministic() const {
    for (std::size_t s = 0; s < n_states(); ++s) {
        auto row = probs_.row(s);
        if (std::count(row.begin(), row.end(), 1.0) != 1) return false;
    }
    return true;
}

std::vector<std::size_t> Policy::actions() const {
    std::vector<std::size_t> out(n_states());
    for (std::size_t s = 0; s < n_states(); ++s) {
        auto row = probs_.row(s);
        out[s] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

namespace {

void check_row(std::span<const double> row, std::size_t s, std::size_t a,
               std::vector<Violation>& out) {
    double sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (!std::isfinite(row[j]) || row[j] < 0.0) {
            out.push_back({"negative or non-finite transition probability to state " +
                               std::to_string(j),
                           s, a, row[j]});
        }
        sum += row[j];
    }
    if (!(std::abs(sum - 1.0) <= kStochasticTol)) {
        out.push_back({"kernel row does not sum to 1", s, a, sum - 1.0});
    }
}

} // namespace

std::vector<Violation> validate_kernel(const Kernel& kernel) {
    std::vector<Violation> out;
    if (kernel.n_states() == 0) out.push_back({"no states", 0, 0, 0.0});
    if (kernel.n_actions() == 0) out.push_back({"no actions", 0, 0, 0.0});
    for (std::size_t s = 0; s < kernel.n_states(); ++s) {
        for (std::size_t a = 0; a < kernel.n_actions(); ++a) {
            check_row(kernel.row(s, a), s, a, out);
        }
    }
    return out;
}

std::vector<Violation> validate_model(const MdpModel& model) {
    auto out = validate_kernel(model.kernel);
    if (model.rewards.rows() != model.n_states() || model.rewards.cols() != model.n_actions()) {
        out.push_back({"reward matrix shape does not match kernel", model.rewards.rows(),
                       model.rewards.cols(), 0.0});
        return out;
    }
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            double r = model.rewards(s, a);
            if (!(r >= 0.0 && r <= 1.0)) out.push_back({"reward outside [0,1]", s, a, r});
        }
    }
    return out;
}

std::string describe(const Violation& v) {
    std::ostringstream os;
    os.precision(17);
    os << v.what << " at (s=" << v.state << ", a=" << v.action << "), magnitude " << v.magnitude;
    return os.str();
}

double span(std::span<const double> v) {
    if (v.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

double dot(std::span<const double> p, std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * v[i];
    return acc;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Policy greedy_policy(const Matrix& q_values) {
    std::vector<std::size_t> actions(q_values.rows());
    for (std::size_t s = 0; s < q_values.rows(); ++s) {
        auto row = q_values.row(s);
        // max_element returns the first maximum
        actions[s] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return Policy::deterministic(actions, q_values.cols());
}

InducedChain induced_chain(const MdpModel& model, const Kernel& kernel, const Policy& policy) {
    const std::size_t n = model.n_states();
    const std::size_t m = model.n_actions();
    if (kernel.n_states() != n || kernel.n_actions() != m || policy.n_states() != n ||
        policy.n_actions() != m) {
        throw InvalidInput("induced_chain: model, kernel and policy dimensions disagree");
    }
    InducedChain chain{Matrix(n, n), Vector(n, 0.0)};
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < m; ++a) {
            const double w = policy(s, a);
            if (w == 0.0) continue;
            chain.reward[s] += w * model.rewards(s, a);
            auto row = kernel.row(s, a);
            for (std::size_t j = 0; j < n; ++j) chain.transition(s, j) += w * row[j];
        }
    }
    return chain;
}

} // namespace rmdp
