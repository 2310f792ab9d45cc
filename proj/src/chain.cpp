#include "rmdp/chain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace rmdp {

namespace {

using Dense = Eigen::MatrixXd;

Dense to_eigen(const Matrix& m) {
    Dense out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    }
    return out;
}

Matrix from_eigen(const Dense& m) {
    Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    }
    return out;
}

void check_square(const Matrix& p) {
    if (p.rows() == 0 || p.rows() != p.cols()) throw InvalidInput("transition matrix must be square");
}

} // namespace

std::size_t count_recurrent_classes(const Matrix& transition) {
    check_square(transition);
    const std::size_t n = transition.rows();
    // transitive closure; desk-scale chains only
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        reach[i][i] = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (transition(i, j) > 0.0) reach[i][j] = true;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!reach[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (reach[k][j]) reach[i][j] = true;
            }
        }
    }
    // i is recurrent iff every state it reaches reaches it back
    std::vector<bool> counted(n, false);
    std::size_t classes = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (counted[i]) continue;
        bool recurrent = true;
        for (std::size_t j = 0; j < n && recurrent; ++j) {
            if (reach[i][j] && !reach[j][i]) recurrent = false;
        }
        if (!recurrent) continue;
        ++classes;
        for (std::size_t j = 0; j < n; ++j) {
            if (reach[i][j]) counted[j] = true;
        }
    }
    return classes;
}

Vector stationary_distribution(const Matrix& transition) {
    check_square(transition);
    const std::size_t classes = count_recurrent_classes(transition);
    if (classes != 1) {
        throw NonUnichainError("chain has " + std::to_string(classes) + " recurrent classes");
    }
    const auto n = static_cast<Eigen::Index>(transition.rows());
    // mu (I - P) = 0 with one balance equation replaced by mu·1 = 1
    Dense a = Dense::Identity(n, n) - to_eigen(transition).transpose();
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::PartialPivLU<Dense> lu(a);
    if (!(lu.rcond() > 0.0)) throw NonUnichainError("singular stationary system");
    Eigen::VectorXd mu = lu.solve(b);
    Vector out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::max(0.0, mu(i));
    double sum = 0.0;
    for (double x : out) sum += x;
    for (double& x : out) x /= sum;
    return out;
}

Matrix limit_matrix(const Matrix& transition) {
    const Vector mu = stationary_distribution(transition);
    Matrix out(mu.size(), mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) std::copy(mu.begin(), mu.end(), out.row(i).begin());
    return out;
}

ChainAnalysis analyze_chain(const Matrix& transition) {
    ChainAnalysis out;
    out.transition = transition;
    out.stationary = stationary_distribution(transition);
    out.limit_matrix = limit_matrix(transition);
    const auto n = static_cast<Eigen::Index>(transition.rows());
    const Dense p = to_eigen(transition);
    const Dense pstar = to_eigen(out.limit_matrix);
    const Dense id = Dense::Identity(n, n);
    Eigen::PartialPivLU<Dense> lu(id - p + pstar);
    out.rcond = lu.rcond();
    if (!(out.rcond > 0.0)) throw NonUnichainError("singular fundamental matrix");
    out.suspect = out.rcond < 1e-12;
    out.deviation_matrix = from_eigen(lu.solve(id - pstar));
    return out;
}

Matrix deviation_matrix(const Matrix& transition) { return analyze_chain(transition).deviation_matrix; }

GainBias gain_and_bias(const MdpModel& model, const Kernel& kernel, const Policy& policy) {
    const auto chain = induced_chain(model, kernel, policy);
    const auto analysis = analyze_chain(chain.transition);
    const std::size_t n = chain.reward.size();
    const double g = dot(analysis.stationary, chain.reward);
    GainBias out{Vector(n, g), Vector(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) out.bias[i] = dot(analysis.deviation_matrix.row(i), chain.reward);
    return out;
}

Vector discounted_value(const MdpModel& model, const Kernel& kernel, const Policy& policy,
                        double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("discount factor must lie in [0,1)");
    const auto chain = induced_chain(model, kernel, policy);
    const auto n = static_cast<Eigen::Index>(chain.reward.size());
    const Dense a = Dense::Identity(n, n) - gamma * to_eigen(chain.transition);
    Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(chain.reward.data(), n);
    Eigen::VectorXd v = a.partialPivLu().solve(r);
    return Vector(v.data(), v.data() + n);
}

} // namespace rmdp
