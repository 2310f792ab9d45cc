#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmdp/core.hpp"

namespace rmdp {

enum class SetKind { Contamination, TotalVariation, KL };

std::string to_string(SetKind kind);
/// Accepts "contamination", "tv" and "kl".
SetKind parse_set_kind(const std::string& name);

/// Radius outside the admissible range of its set family.
class RadiusDomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// (s,a)-rectangular uncertainty set: one ball of the given kind around every
/// nominal kernel row.
///
/// `interior_smoothing` (δ) optionally replaces every candidate row q by
/// (1-δ)q + δ·uniform, which keeps every kernel in the set strictly positive.
class UncertaintySpec {
  public:
    UncertaintySpec(SetKind kind, double radius, double interior_smoothing = 0.0);
    UncertaintySpec(SetKind kind, Matrix radii, double interior_smoothing = 0.0);

    /// The degenerate set {nominal}.
    static UncertaintySpec nominal() { return {SetKind::Contamination, 0.0}; }

    SetKind kind() const { return kind_; }
    double radius(std::size_t s, std::size_t a) const {
        return per_pair_ ? radii_(s, a) : radius_;
    }
    bool shared_radius() const { return !per_pair_; }
    double shared_radius_value() const { return radius_; }
    const Matrix& radii() const { return radii_; }
    double interior_smoothing() const { return smoothing_; }

    /// Throws InvalidInput if a per-pair radius matrix does not fit the model.
    void check_shape(std::size_t n_states, std::size_t n_actions) const;

  private:
    SetKind kind_;
    bool per_pair_ = false;
    double radius_ = 0.0;
    Matrix radii_;
    double smoothing_ = 0.0;
};

struct SupportResult {
    double value = 0.0;
    Vector minimizer;
};

/// min over {(1-R)p + R p'} of q·v.
SupportResult support_contamination(std::span<const double> p, std::span<const double> v,
                                    double radius);
/// min over the total-variation ball {q : ½‖q-p‖₁ ≤ R} of q·v.
SupportResult support_tv(std::span<const double> p, std::span<const double> v, double radius);
/// min over the KL ball {q : KL(q‖p) ≤ R} of q·v, through the one-dimensional dual.
SupportResult support_kl(std::span<const double> p, std::span<const double> v, double radius);

SupportResult support(const UncertaintySpec& spec, std::size_t s, std::size_t a,
                      std::span<const double> p, std::span<const double> v);

/// Amount by which q violates membership in the set around p (≤ 0 means inside).
double membership_defect(SetKind kind, std::span<const double> p, std::span<const double> q,
                         double radius);

/// Evaluates support functions of one fixed value vector against many nominal rows.
/// The ordering of v used by the TV rule and the contamination argmin are computed once.
class SupportEvaluator {
  public:
    SupportEvaluator(const UncertaintySpec& spec, std::span<const double> v);

    double value(std::size_t s, std::size_t a, std::span<const double> p) const;
    SupportResult result(std::size_t s, std::size_t a, std::span<const double> p) const;

  private:
    double raw_value(double radius, std::span<const double> p, std::span<double> minimizer) const;

    const UncertaintySpec& spec_;
    std::span<const double> v_;
    std::size_t argmin_ = 0;
    double mean_ = 0.0;
    std::vector<std::size_t> descending_; // indices sorted by decreasing v
};

/// Stacks the per-(s,a) worst-case rows for value vector v into a full kernel.
Kernel worst_kernel(const MdpModel& model, const UncertaintySpec& spec, std::span<const double> v);

} // namespace rmdp
