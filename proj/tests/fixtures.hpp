#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rmdp/core.hpp"
#include "rmdp/garnet.hpp"

namespace rmdp::fixtures {

/// One state, one action, reward c.
inline MdpModel single_state(double c) {
    MdpModel m{Kernel(1, 1), Matrix(1, 1, c), {}};
    m.kernel(0, 0, 0) = 1.0;
    return m;
}

/// Deterministic 2-cycle 0 -> 1 -> 0 with rewards (0, 1).
inline MdpModel two_state_cycle() {
    MdpModel m{Kernel(2, 1), Matrix(2, 1), {}};
    m.kernel(0, 0, 1) = 1.0;
    m.kernel(1, 0, 0) = 1.0;
    m.rewards(1, 0) = 1.0;
    return m;
}

/// p0 = (0.1, 0.9), p1 = (0.9, 0.1), r = (0, 1).
inline MdpModel smoothed_chain() {
    MdpModel m{Kernel(2, 1), Matrix(2, 1), {}};
    m.kernel(0, 0, 0) = 0.1;
    m.kernel(0, 0, 1) = 0.9;
    m.kernel(1, 0, 0) = 0.9;
    m.kernel(1, 0, 1) = 0.1;
    m.rewards(1, 0) = 1.0;
    return m;
}

/// Worst-case gain of the smoothed chain under contamination R = 0.4.
inline constexpr double kSmoothedChainGain = 0.54 / 1.48;

/// Garnet instance satisfying the strict positivity of the unichain assumption.
inline MdpModel positive_garnet(std::size_t n, std::size_t m, std::uint64_t seed) {
    GarnetConfig cfg;
    cfg.n_states = n;
    cfg.n_actions = m;
    cfg.seed = seed;
    cfg.smoothing = 0.05;
    return generate(cfg);
}

inline Vector random_distribution(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    Vector p(n);
    double sum = 0.0;
    for (double& x : p) sum += (x = e(rng));
    for (double& x : p) x /= sum;
    return p;
}

inline Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (double& x : v) x = u(rng);
    return v;
}

} // namespace rmdp::fixtures
