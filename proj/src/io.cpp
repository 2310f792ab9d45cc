#include "rmdp/io.hpp"

#include <cmath>
#include <fstream>

namespace rmdp {

using nlohmann::json;

json to_json(const MdpModel& model, bool with_metadata) {
    const std::size_t n = model.n_states();
    const std::size_t m = model.n_actions();
    json kernel = json::array();
    json rewards = json::array();
    for (std::size_t s = 0; s < n; ++s) {
        json per_action = json::array();
        json rrow = json::array();
        for (std::size_t a = 0; a < m; ++a) {
            auto row = model.kernel.row(s, a);
            per_action.push_back(std::vector<double>(row.begin(), row.end()));
            rrow.push_back(model.rewards(s, a));
        }
        kernel.push_back(std::move(per_action));
        rewards.push_back(std::move(rrow));
    }
    json j{{"n_states", n}, {"n_actions", m}, {"kernel", std::move(kernel)},
           {"rewards", std::move(rewards)}};
    if (with_metadata && !model.metadata.empty()) j["metadata"] = model.metadata;
    return j;
}

MdpModel model_from_json(const json& j, bool strict) {
    try {
        const auto n = j.at("n_states").get<std::size_t>();
        const auto m = j.at("n_actions").get<std::size_t>();
        if (n == 0 || m == 0) throw InvalidInput("n_states and n_actions must be positive");
        const auto& kj = j.at("kernel");
        const auto& rj = j.at("rewards");
        if (kj.size() != n || rj.size() != n) {
            throw InvalidInput("kernel/rewards outer length differs from n_states");
        }
        MdpModel model{Kernel(n, m), Matrix(n, m), {}};
        for (std::size_t s = 0; s < n; ++s) {
            if (kj[s].size() != m || rj[s].size() != m) {
                throw InvalidInput("state " + std::to_string(s) + ": expected " +
                                   std::to_string(m) + " actions");
            }
            for (std::size_t a = 0; a < m; ++a) {
                const auto& row = kj[s][a];
                if (row.size() != n) {
                    throw InvalidInput("kernel row (" + std::to_string(s) + "," +
                                       std::to_string(a) + ") has wrong length");
                }
                auto out = model.kernel.row(s, a);
                double sum = 0.0;
                for (std::size_t t = 0; t < n; ++t) {
                    out[t] = row[t].get<double>();
                    sum += out[t];
                }
                if (strict) {
                    if (!(std::abs(sum - 1.0) <= kRenormalizeTol)) {
                        throw InvalidInput("kernel row (" + std::to_string(s) + "," +
                                           std::to_string(a) + ") sums to " +
                                           std::to_string(sum));
                    }
                    // rows already stochastic within kStochasticTol stay bit-exact
                    if (std::abs(sum - 1.0) > kStochasticTol) {
                        for (double& x : out) x /= sum;
                    }
                }
                model.rewards(s, a) = rj[s][a].get<double>();
            }
        }
        if (j.contains("metadata")) {
            model.metadata = j.at("metadata").get<std::map<std::string, double>>();
        }
        if (strict) {
            auto violations = validate_model(model);
            if (!violations.empty()) throw InvalidInput(describe(violations.front()));
        }
        return model;
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed MDP JSON: ") + e.what());
    }
}

MdpModel load_model(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open model file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidInput("cannot parse " + path.string() + ": " + e.what());
    }
    return model_from_json(j, strict);
}

void save_model(const std::filesystem::path& path, const MdpModel& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(model).dump() << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

json to_json(const Policy& policy) {
    json rows = json::array();
    for (std::size_t s = 0; s < policy.n_states(); ++s) {
        auto row = policy.probs().row(s);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

Policy policy_from_json(const json& j, std::size_t n_actions) {
    // Either a list of action indices or a [state][action] probability matrix.
    if (!j.is_array() || j.empty()) throw InvalidInput("policy must be a non-empty array");
    if (j.front().is_number()) {
        return Policy::deterministic(j.get<std::vector<std::size_t>>(), n_actions);
    }
    Matrix probs(j.size(), n_actions);
    for (std::size_t s = 0; s < j.size(); ++s) {
        if (j[s].size() != n_actions) throw InvalidInput("policy row has wrong length");
        double sum = 0.0;
        for (std::size_t a = 0; a < n_actions; ++a) {
            probs(s, a) = j[s][a].get<double>();
            if (probs(s, a) < 0.0) throw InvalidInput("negative policy probability");
            sum += probs(s, a);
        }
        if (std::abs(sum - 1.0) > kRenormalizeTol) throw InvalidInput("policy row not stochastic");
    }
    return Policy(std::move(probs));
}

} // namespace rmdp
