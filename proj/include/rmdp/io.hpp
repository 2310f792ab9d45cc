#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "rmdp/core.hpp"

namespace rmdp {

/// Serializes to `{"n_states", "n_actions", "kernel", "rewards"}` plus optional "metadata".
nlohmann::json to_json(const MdpModel& model, bool with_metadata = true);

/// Parses the MDP JSON schema. With `strict`, rows whose sums deviate from 1 by at
/// most kRenormalizeTol are renormalized and anything else throws InvalidInput; without
/// it the numbers are taken verbatim so validate_model can report them.
MdpModel model_from_json(const nlohmann::json& j, bool strict = true);

MdpModel load_model(const std::filesystem::path& path, bool strict = true);
void save_model(const std::filesystem::path& path, const MdpModel& model);

nlohmann::json to_json(const Policy& policy);
Policy policy_from_json(const nlohmann::json& j, std::size_t n_actions);

} // namespace rmdp
