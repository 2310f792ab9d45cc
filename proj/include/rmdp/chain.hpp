#pragma once

#include <stdexcept>

#include "rmdp/core.hpp"

namespace rmdp {

/// The chain has more than one recurrent class (or the solve is singular).
class NonUnichainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Stationary, limit and deviation matrices of a unichain transition matrix.
struct ChainAnalysis {
    Matrix transition;
    Vector stationary;
    Matrix limit_matrix;     ///< P* (every row equals the stationary distribution)
    Matrix deviation_matrix; ///< H = (I - P + P*)^{-1} (I - P*)
    /// Reciprocal condition estimate of (I - P + P*); below 1e-12 the result is suspect.
    double rcond = 1.0;
    bool suspect = false;
};

/// Number of closed communicating classes in the positive-entry graph of P.
std::size_t count_recurrent_classes(const Matrix& transition);

Vector stationary_distribution(const Matrix& transition);
Matrix limit_matrix(const Matrix& transition);
Matrix deviation_matrix(const Matrix& transition);
ChainAnalysis analyze_chain(const Matrix& transition);

/// Non-robust gain P* r_π (state-constant) and bias H r_π of a fixed kernel and policy.
GainBias gain_and_bias(const MdpModel& model, const Kernel& kernel, const Policy& policy);

/// Exact solve of (I - γ P^π) V = r_π.
Vector discounted_value(const MdpModel& model, const Kernel& kernel, const Policy& policy,
                        double gamma);

} // namespace rmdp
