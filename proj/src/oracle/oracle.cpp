#include "rmdp/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rmdp/average_direct.hpp"
#include "rmdp/chain.hpp"

namespace rmdp::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool feasible(SetKind kind, std::span<const double> p, std::span<const double> q, double radius) {
    return membership_defect(kind, p, q, radius) <= 1e-12;
}

struct GridSearch {
    SetKind kind;
    std::span<const double> p;
    std::span<const double> v;
    double radius;

    double best = kInf;
    std::vector<double> best_point;

    void consider(std::span<const double> q) {
        if (!feasible(kind, p, q, radius)) return;
        const double value = dot(q, v);
        if (value < best) {
            best = value;
            best_point.assign(q.begin(), q.end());
        }
    }

    // Scans center ± half_steps·step on the first n-1 coordinates.
    void scan(const std::vector<double>& center, double step, int half_steps) {
        const std::size_t free = p.size() - 1;
        std::vector<int> k(free, -half_steps);
        std::vector<double> q(p.size());
        while (true) {
            double sum = 0.0;
            bool ok = true;
            for (std::size_t i = 0; i < free && ok; ++i) {
                q[i] = center[i] + k[i] * step;
                if (q[i] < -1e-15 || q[i] > 1.0 + 1e-15) ok = false;
                q[i] = std::clamp(q[i], 0.0, 1.0);
                sum += q[i];
            }
            if (ok && sum <= 1.0 + 1e-15) {
                q[free] = std::max(0.0, 1.0 - sum);
                consider(q);
            }
            std::size_t i = 0;
            while (i < free && ++k[i] > half_steps) {
                k[i] = -half_steps;
                ++i;
            }
            if (i == free) break;
        }
    }
};

} // namespace

double oracle_support(SetKind kind, std::span<const double> p, std::span<const double> v,
                      double radius, double resolution) {
    if (p.size() != v.size() || p.empty()) throw InvalidInput("oracle_support: length mismatch");
    if (p.size() > 4) throw InvalidInput("oracle_support: refuses more than 4 states");
    if (!(resolution > 0.0)) throw InvalidInput("oracle_support: resolution must be positive");
    GridSearch grid{kind, p, v, radius, kInf, {}};
    grid.consider(p);
    if (p.size() == 1) return grid.best;
    if (p.size() == 2) {
        const auto steps = static_cast<long>(std::ceil(1.0 / resolution));
        std::vector<double> q(2);
        for (long i = 0; i <= steps; ++i) {
            q[0] = std::min(1.0, static_cast<double>(i) / static_cast<double>(steps));
            q[1] = 1.0 - q[0];
            grid.consider(q);
        }
        return grid.best;
    }
    constexpr int kHalf = 20;
    double step = 1.0 / (2 * kHalf);
    std::vector<double> center(p.size() - 1, 0.5);
    grid.scan(center, step, kHalf);
    while (true) {
        // re-center at this resolution until the incumbent stops moving
        for (int rounds = 0; rounds < 50; ++rounds) {
            std::vector<double> incumbent(grid.best_point.begin(), grid.best_point.end() - 1);
            grid.scan(incumbent, step, kHalf);
            std::vector<double> after(grid.best_point.begin(), grid.best_point.end() - 1);
            if (after == incumbent) break;
        }
        if (step <= resolution) break;
        step = std::max(step / 10.0, resolution);
    }
    return grid.best;
}

double tv_vertex_enumeration(std::span<const double> p, std::span<const double> v, double radius) {
    const std::size_t n = p.size();
    const std::size_t dim = 2 * n;
    // rows a_k·x >= b_k over x = (q, t)
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
        a(i) = 1.0;
        rows.push_back(a);
        rhs.push_back(0.0);
        a.setZero();
        a(n + i) = 1.0;
        a(i) = -1.0;
        rows.push_back(a);
        rhs.push_back(-p[i]);
        a.setZero();
        a(n + i) = 1.0;
        a(i) = 1.0;
        rows.push_back(a);
        rhs.push_back(p[i]);
    }
    Eigen::VectorXd budget = Eigen::VectorXd::Zero(dim);
    budget.tail(n).setConstant(-1.0);
    rows.push_back(budget);
    rhs.push_back(-2.0 * radius);

    Eigen::VectorXd sum_q = Eigen::VectorXd::Zero(dim);
    sum_q.head(n).setOnes();

    const std::size_t m = rows.size();
    const std::size_t choose = dim - 1;
    std::vector<bool> mask(m, false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(choose), true);
    double best = kInf;
    do {
        Eigen::MatrixXd a(dim, dim);
        Eigen::VectorXd b(dim);
        a.row(0) = sum_q.transpose();
        b(0) = 1.0;
        Eigen::Index r = 1;
        for (std::size_t k = 0; k < m; ++k) {
            if (!mask[k]) continue;
            a.row(r) = rows[k].transpose();
            b(r) = rhs[k];
            ++r;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (lu.rank() < static_cast<Eigen::Index>(dim)) continue;
        const Eigen::VectorXd x = lu.solve(b);
        bool ok = true;
        for (std::size_t k = 0; k < m && ok; ++k) ok = rows[k].dot(x) >= rhs[k] - 1e-12;
        if (!ok) continue;
        double value = 0.0;
        for (std::size_t i = 0; i < n; ++i) value += x(static_cast<Eigen::Index>(i)) * v[i];
        best = std::min(best, value);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

double kl_two_state_bisection(std::span<const double> p, std::span<const double> v, double radius) {
    if (p.size() != 2) throw InvalidInput("kl_two_state_bisection: needs two states");
    // move mass toward the lower-valued state as far as the KL budget allows
    const std::size_t lo = v[0] <= v[1] ? 0 : 1;
    auto kl = [&](double x) { // x = mass on state lo
        double out = 0.0;
        const double q[2] = {lo == 0 ? x : 1.0 - x, lo == 0 ? 1.0 - x : x};
        for (int i = 0; i < 2; ++i) {
            if (q[i] > 0.0) out += q[i] * std::log(q[i] / p[i]);
        }
        return out;
    };
    double a = p[lo];
    double b = 1.0;
    if (p[lo] == 0.0) return dot(p, v);
    if (kl(b) <= radius) {
        a = b;
    } else {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            (kl(mid) <= radius ? a : b) = mid;
        }
    }
    return a * v[lo] + (1.0 - a) * v[1 - lo];
}

double tv_printed_dual(std::span<const double> p, std::span<const double> v, double radius,
                       double mu_max, double mu_step) {
    if (p.size() != 2) throw InvalidInput("tv_printed_dual: two-state grids only");
    double best = kInf;
    for (double m0 = 0.0; m0 <= mu_max + 1e-12; m0 += mu_step) {
        for (double m1 = 0.0; m1 <= mu_max + 1e-12; m1 += mu_step) {
            const double w[2] = {v[0] - m0, v[1] - m1};
            best = std::min(best, std::max(w[0], w[1]) - std::min(w[0], w[1]));
        }
    }
    return dot(p, v) - radius * best;
}

double tv_shifted_dual(std::span<const double> p, std::span<const double> v, double radius,
                       double mu_max, double mu_step) {
    if (p.size() != 2) throw InvalidInput("tv_shifted_dual: two-state grids only");
    double best = -kInf;
    for (double m0 = 0.0; m0 <= mu_max + 1e-12; m0 += mu_step) {
        for (double m1 = 0.0; m1 <= mu_max + 1e-12; m1 += mu_step) {
            const double w[2] = {v[0] - m0, v[1] - m1};
            best = std::max(best, p[0] * w[0] + p[1] * w[1] -
                                      radius * (std::max(w[0], w[1]) - std::min(w[0], w[1])));
        }
    }
    return best;
}

void for_each_deterministic_policy(std::size_t n_states, std::size_t n_actions,
                                   const std::function<void(const Policy&)>& visit) {
    std::vector<std::size_t> actions(n_states, 0);
    while (true) {
        visit(Policy::deterministic(actions, n_actions));
        std::size_t s = 0;
        while (s < n_states && ++actions[s] == n_actions) {
            actions[s] = 0;
            ++s;
        }
        if (s == n_states) return;
    }
}

EnumerationResult best_deterministic_policy(std::size_t n_states, std::size_t n_actions,
                                            const std::function<double(const Policy&)>& score) {
    EnumerationResult out;
    out.best_score = -kInf;
    double second = -kInf;
    for_each_deterministic_policy(n_states, n_actions, [&](const Policy& pi) {
        const double value = score(pi);
        if (value > out.best_score) {
            second = out.best_score;
            out.best_score = value;
            out.best = pi;
        } else if (value > second) {
            second = value;
        }
    });
    out.gap = out.best_score - second;
    return out;
}

double worst_kernel_gain(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy) {
    RviParams params;
    params.epsilon = 1e-11;
    const auto robust = robust_rvi_eval(model, spec, policy, params);
    const Kernel worst = worst_kernel(model, spec, robust.solution.bias);
    return gain_and_bias(model, worst, policy).gain.front();
}

Vector truncated_discounted_value(const Matrix& transition, std::span<const double> reward,
                                  double gamma, std::size_t horizon) {
    const std::size_t n = reward.size();
    Vector term(reward.begin(), reward.end());
    Vector total(n, 0.0);
    double weight = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t i = 0; i < n; ++i) total[i] += weight * term[i];
        Vector next(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) next[i] = dot(transition.row(i), term);
        term = std::move(next);
        weight *= gamma;
    }
    return total;
}

Vector cesaro_bias(const Matrix& transition, std::span<const double> reward, double gain,
                   std::size_t n) {
    const std::size_t dim = reward.size();
    Vector term(reward.begin(), reward.end()); // P^t r
    Vector partial(dim, 0.0);                  // Σ_{t<k} (P^t r - g)
    Vector average(dim, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < dim; ++i) {
            partial[i] += term[i] - gain;
            average[i] += partial[i];
        }
        Vector next(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) next[i] = dot(transition.row(i), term);
        term = std::move(next);
    }
    for (double& x : average) x /= static_cast<double>(n);
    return average;
}

} // namespace rmdp::oracle
