#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "rmdp/core.hpp"

namespace rmdp {

/// Counter-based 64-bit generator: output n of stream k is splitmix64(key(seed, k) + n·φ).
/// Every stream is independent of how many values other streams consumed, so generation
/// order (serial or parallel) never changes the result.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

enum class RewardLaw {
    GaussianNormalized, ///< r ~ N(0, σ_sa), σ_sa ~ U[0,1], then mapped onto [0,1]
    Uniform01,
};

std::string to_string(RewardLaw law);
RewardLaw parse_reward_law(const std::string& name);

struct GarnetConfig {
    std::size_t n_states = 20;
    std::size_t n_actions = 30;
    std::uint64_t seed = 0;
    /// Weight of the uniform distribution mixed into every nominal row.
    double smoothing = 0.0;
    RewardLaw reward_law = RewardLaw::GaussianNormalized;
    /// Number of reachable next states per row; 0 means dense rows.
    std::size_t branching = 0;
};

/// Random MDP with Dirichlet(1) rows (optionally restricted to `branching` successors),
/// mixed with uniform, and rewards mapped affinely onto [0,1] over the whole matrix.
MdpModel generate(const GarnetConfig& config);

/// SHA-256 (hex) of the canonical JSON serialization, metadata excluded.
std::string fingerprint(const MdpModel& model);

} // namespace rmdp
