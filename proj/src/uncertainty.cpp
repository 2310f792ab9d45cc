#include "rmdp/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>


namespace rmdp {

namespace {


void check_radius(SetKind kind, double radius) {
    if (!std::isfinite(radius) || radius < 0.0) {
        throw RadiusDomainError(to_string(kind) + " radius must be a nonnegative finite number, got " +
                                std::to_string(radius));
    }
    if (kind != SetKind::KL && radius > 1.0) {
        throw RadiusDomainError(to_string(kind) + " radius must lie in [0,1], got " +
                                std::to_string(radius));
    }
}

void check_distribution(std::span<const double> p, std::span<const double> v) {
    if (p.size() != v.size() || p.empty()) {
        throw InvalidInput("support: distribution and value vector lengths differ");
    }
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw InvalidInput("support: negative probability in nominal row");
        sum += x;
    }
    if (std::abs(sum - 1.0) > kRenormalizeTol) {
        throw InvalidInput("support: nominal row is not a distribution");
    }
}

std::size_t argmin_index(std::span<const double> v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

std::vector<std::size_t> descending_order(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] > v[j]; });
    return order;
}

double contamination_value(double radius, std::span<const double> p, std::span<const double> v,
                           std::size_t argmin, std::span<double> minimizer) {
    if (!minimizer.empty()) {
        for (std::size_t i = 0; i < p.size(); ++i) minimizer[i] = (1.0 - radius) * p[i];
        minimizer[argmin] += radius;
    }
    return (1.0 - radius) * dot(p, v) + radius * v[argmin];
}

// Greedy LP solution: shift up to `radius` mass from the highest-valued states onto
// the lowest-valued one.
double tv_value(double radius, std::span<const double> p, std::span<const double> v,
                std::size_t argmin, std::span<const std::size_t> descending,
                std::span<double> minimizer) {
    if (!minimizer.empty()) std::copy(p.begin(), p.end(), minimizer.begin());
    double value = dot(p, v);
    double budget = radius;
    const double vmin = v[argmin];
    double moved = 0.0;
    for (std::size_t i : descending) {
        if (budget <= 0.0 || v[i] <= vmin) break;
        const double delta = std::min(p[i], budget);
        if (delta <= 0.0) continue;
        budget -= delta;
        moved += delta;
        value -= delta * (v[i] - vmin);
        if (!minimizer.empty()) minimizer[i] -= delta;
    }
    if (!minimizer.empty()) minimizer[argmin] += moved;
    return value;
}

// Exponential tilt q ∝ p exp(-beta d) of the nominal row, d = v - m >= 0 on supp(p).
struct Tilt {
    double log_z = 0.0;
    double mean = 0.0;     ///< E_q d
    double variance = 0.0; ///< Var_q d
    double kl(double beta) const { return -beta * mean - log_z; }
};

Tilt tilt(std::span<const double> p, std::span<const double> d, double beta) {
    double z = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        const double w = p[i] * std::exp(-beta * d[i]);
        z += w;
        s1 += w * d[i];
        s2 += w * d[i] * d[i];
    }
    Tilt t;
    t.log_z = std::log(z);
    t.mean = s1 / z;
    t.variance = std::max(0.0, s2 / z - t.mean * t.mean);
    return t;
}

// Dual: sigma = m - min_{alpha>0} alpha (R + log E_p exp(-d/alpha)), d = v - m.
// With beta = 1/alpha the minimizer solves KL(q_beta || p) = R, and KL increases in
// beta with slope beta Var_q(d); the root is found by safeguarded Newton in log beta.
double kl_value(double radius, std::span<const double> p, std::span<const double> v,
                std::span<double> minimizer) {
    if (radius == 0.0) {
        if (!minimizer.empty()) std::copy(p.begin(), p.end(), minimizer.begin());
        return dot(p, v);
    }
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) m = std::min(m, v[i]);
    }
    Vector d(p.size(), 0.0);
    double floor_mass = 0.0;
    double d_pos = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        d[i] = v[i] - m;
        if (d[i] == 0.0) {
            floor_mass += p[i];
        } else {
            d_pos = std::min(d_pos, d[i]);
        }
    }

    // As beta -> inf the tilt collapses onto argmin v with KL = -log(floor_mass).
    if (floor_mass >= 1.0 || radius >= -std::log(floor_mass)) {
        if (!minimizer.empty()) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                minimizer[i] = (p[i] > 0.0 && d[i] == 0.0) ? p[i] / floor_mass : 0.0;
            }
        }
        return m;
    }

    // beyond this every non-floor weight underflows, so KL equals its limit > R
    const double u_cap = std::log(800.0 / d_pos);
    const Tilt base = tilt(p, d, 0.0);
    double u = base.variance > 0.0 ? 0.5 * std::log(2.0 * radius / base.variance) : 0.0;
    u = std::min(u, u_cap);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = u_cap;
    Tilt t = tilt(p, d, std::exp(u));
    for (int it = 0; it < 200; ++it) {
        const double beta = std::exp(u);
        const double g = t.kl(beta) - radius;
        if (g < 0.0) {
            lo = u;
        } else {
            hi = u;
        }
        if (std::abs(g) <= 1e-15 * std::max(1.0, radius) || hi - lo <= 1e-14 * std::max(1.0, std::abs(u))) break;
        const double slope = beta * beta * t.variance; // dKL/du
        double next = slope > 0.0 ? u - g / slope : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo && next < hi)) {
            next = std::isfinite(lo) ? 0.5 * (lo + hi) : std::min(hi, u) - 2.0;
        }
        u = next;
        t = tilt(p, d, std::exp(u));
    }

    const double beta = std::exp(u);
    if (!minimizer.empty()) {
        double z = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            minimizer[i] = p[i] > 0.0 ? p[i] * std::exp(-beta * d[i]) : 0.0;
            z += minimizer[i];
        }
        for (double& q : minimizer) q /= z;
    }
    return m - (radius + t.log_z) / beta;
}

} // namespace

std::string to_string(SetKind kind) {
    switch (kind) {
    case SetKind::Contamination:
        return "contamination";
    case SetKind::TotalVariation:
        return "tv";
    case SetKind::KL:
        return "kl";
    }
    return "unknown";
}

SetKind parse_set_kind(const std::string& name) {
    if (name == "contamination") return SetKind::Contamination;
    if (name == "tv") return SetKind::TotalVariation;
    if (name == "kl") return SetKind::KL;
    throw InvalidInput("unknown uncertainty kind '" + name + "' (expected contamination|tv|kl)");
}

UncertaintySpec::UncertaintySpec(SetKind kind, double radius, double interior_smoothing)
    : kind_(kind), radius_(radius), smoothing_(interior_smoothing) {
    check_radius(kind, radius);
    if (!(interior_smoothing >= 0.0 && interior_smoothing < 1.0)) {
        throw InvalidInput("interior smoothing must lie in [0,1)");
    }
}

UncertaintySpec::UncertaintySpec(SetKind kind, Matrix radii, double interior_smoothing)
    : kind_(kind), per_pair_(true), radii_(std::move(radii)), smoothing_(interior_smoothing) {
    for (double r : radii_.data()) check_radius(kind, r);
    if (!(interior_smoothing >= 0.0 && interior_smoothing < 1.0)) {
        throw InvalidInput("interior smoothing must lie in [0,1)");
    }
}

void UncertaintySpec::check_shape(std::size_t n_states, std::size_t n_actions) const {
    if (per_pair_ && (radii_.rows() != n_states || radii_.cols() != n_actions)) {
        throw InvalidInput("radius matrix shape does not match the model");
    }
}

SupportResult support_contamination(std::span<const double> p, std::span<const double> v,
                                    double radius) {
    check_radius(SetKind::Contamination, radius);
    check_distribution(p, v);
    SupportResult out{0.0, Vector(p.size())};
    out.value = contamination_value(radius, p, v, argmin_index(v), out.minimizer);
    return out;
}

SupportResult support_tv(std::span<const double> p, std::span<const double> v, double radius) {
    check_radius(SetKind::TotalVariation, radius);
    check_distribution(p, v);
    SupportResult out{0.0, Vector(p.size())};
    const auto order = descending_order(v);
    out.value = tv_value(radius, p, v, argmin_index(v), order, out.minimizer);
    return out;
}

SupportResult support_kl(std::span<const double> p, std::span<const double> v, double radius) {
    check_radius(SetKind::KL, radius);
    check_distribution(p, v);
    SupportResult out{0.0, Vector(p.size())};
    out.value = kl_value(radius, p, v, out.minimizer);
    return out;
}

SupportResult support(const UncertaintySpec& spec, std::size_t s, std::size_t a,
                      std::span<const double> p, std::span<const double> v) {
    check_distribution(p, v);
    return SupportEvaluator(spec, v).result(s, a, p);
}

double membership_defect(SetKind kind, std::span<const double> p, std::span<const double> q,
                         double radius) {
    switch (kind) {
    case SetKind::Contamination: {
        double worst = 0.0;
        if (radius == 0.0) return max_abs_diff(p, q);
        for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, (1.0 - radius) * p[i] - q[i]);
        return worst;
    }
    case SetKind::TotalVariation: {
        double l1 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(q[i] - p[i]);
        return 0.5 * l1 - radius;
    }
    case SetKind::KL: {
        double kl = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (q[i] <= 0.0) continue;
            if (p[i] <= 0.0) return std::numeric_limits<double>::infinity();
            kl += q[i] * std::log(q[i] / p[i]);
        }
        return kl - radius;
    }
    }
    return std::numeric_limits<double>::infinity();
}

SupportEvaluator::SupportEvaluator(const UncertaintySpec& spec, std::span<const double> v)
    : spec_(spec), v_(v), argmin_(argmin_index(v)) {
    mean_ = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (spec.kind() == SetKind::TotalVariation) descending_ = descending_order(v);
}

double SupportEvaluator::raw_value(double radius, std::span<const double> p,
                                   std::span<double> minimizer) const {
    switch (spec_.kind()) {
    case SetKind::Contamination:
        return contamination_value(radius, p, v_, argmin_, minimizer);
    case SetKind::TotalVariation:
        return tv_value(radius, p, v_, argmin_, descending_, minimizer);
    case SetKind::KL:
        return kl_value(radius, p, v_, minimizer);
    }
    return 0.0;
}

double SupportEvaluator::value(std::size_t s, std::size_t a, std::span<const double> p) const {
    const double raw = raw_value(spec_.radius(s, a), p, {});
    const double delta = spec_.interior_smoothing();
    return delta == 0.0 ? raw : (1.0 - delta) * raw + delta * mean_;
}

SupportResult SupportEvaluator::result(std::size_t s, std::size_t a,
                                       std::span<const double> p) const {
    SupportResult out{0.0, Vector(p.size())};
    out.value = raw_value(spec_.radius(s, a), p, out.minimizer);
    const double delta = spec_.interior_smoothing();
    if (delta != 0.0) {
        const double u = 1.0 / static_cast<double>(p.size());
        for (double& q : out.minimizer) q = (1.0 - delta) * q + delta * u;
        out.value = (1.0 - delta) * out.value + delta * mean_;
    }
    return out;
}

Kernel worst_kernel(const MdpModel& model, const UncertaintySpec& spec, std::span<const double> v) {
    if (v.size() != model.n_states()) throw InvalidInput("worst_kernel: value vector length");
    spec.check_shape(model.n_states(), model.n_actions());
    Kernel out(model.n_states(), model.n_actions());
    SupportEvaluator eval(spec, v);
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            auto res = eval.result(s, a, model.kernel.row(s, a));
            std::copy(res.minimizer.begin(), res.minimizer.end(), out.row(s, a).begin());
        }
    }
    return out;
}

} // namespace rmdp
