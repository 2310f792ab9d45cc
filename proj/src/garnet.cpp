#include "rmdp/garnet.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "rmdp/io.hpp"

namespace rmdp {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kRewardStream = 0;

std::uint64_t row_stream(std::size_t s, std::size_t a, std::size_t n_actions) {
    return 1 + static_cast<std::uint64_t>(s * n_actions + a);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream + kGoldenGamma))) {}

CounterRng::result_type CounterRng::operator()() { return splitmix64(key_ + (++counter_) * kGoldenGamma); }

std::string to_string(RewardLaw law) {
    return law == RewardLaw::GaussianNormalized ? "gaussian" : "uniform";
}

RewardLaw parse_reward_law(const std::string& name) {
    if (name == "gaussian") return RewardLaw::GaussianNormalized;
    if (name == "uniform") return RewardLaw::Uniform01;
    throw InvalidInput("unknown reward law '" + name + "' (expected gaussian|uniform)");
}

MdpModel generate(const GarnetConfig& config) {
    const std::size_t n = config.n_states;
    const std::size_t m = config.n_actions;
    if (n == 0 || m == 0) throw InvalidInput("garnet sizes must be positive");
    if (!(config.smoothing >= 0.0 && config.smoothing < 1.0)) {
        throw InvalidInput("garnet smoothing must lie in [0,1)");
    }
    if (config.branching > n) throw InvalidInput("branching exceeds the number of states");

    MdpModel model{Kernel(n, m), Matrix(n, m), {}};
    const std::size_t width = config.branching == 0 ? n : config.branching;
    std::vector<std::size_t> targets(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < m; ++a) {
            CounterRng rng(config.seed, row_stream(s, a, m));
            std::iota(targets.begin(), targets.end(), std::size_t{0});
            if (width < n) {
                for (std::size_t i = 0; i < width; ++i) {
                    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
                    std::swap(targets[i], targets[pick(rng)]);
                }
            }
            std::exponential_distribution<double> expo(1.0);
            auto row = model.kernel.row(s, a);
            double total = 0.0;
            for (std::size_t i = 0; i < width; ++i) {
                const double x = expo(rng);
                row[targets[i]] = x;
                total += x;
            }
            const double u = config.smoothing / static_cast<double>(n);
            for (double& x : row) x = (1.0 - config.smoothing) * (x / total) + u;
        }
    }

    CounterRng rng(config.seed, kRewardStream);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < m; ++a) {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            if (config.reward_law == RewardLaw::GaussianNormalized) {
                const double sigma = unit(rng);
                std::normal_distribution<double> gauss(0.0, sigma);
                model.rewards(s, a) = sigma > 0.0 ? gauss(rng) : 0.0;
            } else {
                model.rewards(s, a) = unit(rng);
            }
        }
    }
    const auto [lo, hi] = std::minmax_element(model.rewards.data().begin(), model.rewards.data().end());
    const double offset = *lo;
    const double scale = *hi - *lo;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < m; ++a) {
            model.rewards(s, a) = scale > 0.0 ? (model.rewards(s, a) - offset) / scale : 0.5;
        }
    }
    model.metadata["reward_offset"] = offset;
    model.metadata["reward_scale"] = scale;
    model.metadata["smoothing"] = config.smoothing;
    return model;
}

std::string fingerprint(const MdpModel& model) {
    const std::string canonical = to_json(model, false).dump();
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(canonical.data(), canonical.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

} // namespace rmdp
