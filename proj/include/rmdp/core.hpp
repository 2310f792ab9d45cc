#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmdp {

using Vector = std::vector<double>;

/// Thrown when two inputs disagree on dimensions or an input is malformed.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Transition tensor indexed [state][action][next_state].
class Kernel {
  public:
    Kernel() = default;
    Kernel(std::size_t n_states, std::size_t n_actions)
        : n_states_(n_states), n_actions_(n_actions),
          data_(n_states * n_actions * n_states, 0.0) {}

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }

    double& operator()(std::size_t s, std::size_t a, std::size_t next) {
        return data_[(s * n_actions_ + a) * n_states_ + next];
    }
    double operator()(std::size_t s, std::size_t a, std::size_t next) const {
        return data_[(s * n_actions_ + a) * n_states_ + next];
    }

    std::span<double> row(std::size_t s, std::size_t a) {
        return {data_.data() + (s * n_actions_ + a) * n_states_, n_states_};
    }
    std::span<const double> row(std::size_t s, std::size_t a) const {
        return {data_.data() + (s * n_actions_ + a) * n_states_, n_states_};
    }

    bool operator==(const Kernel&) const = default;

  private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> data_;
};

/// Finite MDP: nominal kernel plus rewards in [0,1].
struct MdpModel {
    Kernel kernel;
    Matrix rewards; ///< [state][action]
    /// Free-form provenance (e.g. the reward normalization applied by a generator).
    std::map<std::string, double> metadata;

    std::size_t n_states() const { return kernel.n_states(); }
    std::size_t n_actions() const { return kernel.n_actions(); }
};

/// Stationary policy as a row-stochastic [state][action] matrix.
class Policy {
  public:
    Policy() = default;
    explicit Policy(Matrix probs) : probs_(std::move(probs)) {}

    static Policy deterministic(std::span<const std::size_t> actions, std::size_t n_actions);
    static Policy uniform(std::size_t n_states, std::size_t n_actions);

    std::size_t n_states() const { return probs_.rows(); }
    std::size_t n_actions() const { return probs_.cols(); }
    double operator()(std::size_t s, std::size_t a) const { return probs_(s, a); }
    const Matrix& probs() const { return probs_; }

    bool is_deterministic() const;
    /// Action with the largest probability per state (lowest index on ties).
    std::vector<std::size_t> actions() const;

    bool operator==(const Policy&) const = default;

  private:
    Matrix probs_;
};

/// Average-reward vector paired with a relative value (bias) vector.
struct GainBias {
    Vector gain;
    Vector bias;
};

/// Row-sum tolerance for a probability vector.
inline constexpr double kStochasticTol = 1e-12;
/// Largest row-sum deviation that loaders silently renormalize.
inline constexpr double kRenormalizeTol = 1e-9;

struct Violation {
    std::string what;
    std::size_t state = 0;
    std::size_t action = 0;
    double magnitude = 0.0;
};

std::vector<Violation> validate_model(const MdpModel& model);
std::string describe(const Violation& v);

/// Violations of row-stochasticity for a bare kernel.
std::vector<Violation> validate_kernel(const Kernel& kernel);

double span(std::span<const double> v);
double dot(std::span<const double> p, std::span<const double> v);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Deterministic argmax policy; ties go to the lowest action index.
Policy greedy_policy(const Matrix& q_values);

struct InducedChain {
    Matrix transition;
    Vector reward;
};

InducedChain induced_chain(const MdpModel& model, const Kernel& kernel, const Policy& policy);

} // namespace rmdp
