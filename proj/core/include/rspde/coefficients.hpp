#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rspde {

/// Penalty f used by the penalised equation; both are nonincreasing,
/// vanish on [0, inf) and are positive on (-inf, 0).
enum class PenaltyKind {
    negative_part,  ///< f(u) = u^- = max(-u, 0)
    arctan_square,  ///< f(u) = arctan((u ^ 0)^2)
};

double penalty_value(PenaltyKind kind, double u) noexcept;
/// Almost-everywhere derivative; f'(0) is taken to be 0.
double penalty_derivative(PenaltyKind kind, double u) noexcept;

/// Drift b, diffusion sigma and penalty f together with the declared
/// Lipschitz constants and diffusion bounds kappa1 <= |sigma| <= kappa2.
struct CoefficientModel {
    using ScalarFn = std::function<double(double)>;

    std::string name;
    std::map<std::string, double> params;  ///< catalogue parameters, for provenance
    ScalarFn b;
    ScalarFn sigma;
    ScalarFn db;      ///< b'; empty when b is not differentiable
    ScalarFn dsigma;  ///< sigma'; empty when sigma is not differentiable
    PenaltyKind penalty = PenaltyKind::negative_part;
    double L_b = 0.0;
    double L_sigma = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;

    bool differentiable() const noexcept { return static_cast<bool>(db) && static_cast<bool>(dsigma); }
};

/// Catalogue entries (formulas in docs/models.md):
///   constant:       b(u) = b0, sigma(u) = s0
///   affine_clamped: b(u) = b0 + b1 clamp(u,-c,c), sigma(u) = s0 + s1 clamp(u,-c,c)
///   sin_modulated:  b(u) = b0 + b_amp sin(b_freq u), sigma(u) = s_mean + s_amp sin(s_freq u)
/// Missing parameters take catalogue defaults; unknown names or parameters
/// throw InvalidArgument. The declared constants are the tight ones implied
/// by the parameters.
CoefficientModel make_catalogue_model(const std::string& name,
                                      const std::map<std::string, double>& params = {},
                                      PenaltyKind penalty = PenaltyKind::negative_part);

std::vector<std::string> catalogue_names();
/// Parameter names and defaults of a catalogue entry.
std::map<std::string, double> catalogue_defaults(const std::string& name);

/// The reference model used throughout the checks: b(u) = sin u,
/// sigma(u) = 1.5 + 0.4 sin u, declared L_b = L_sigma = 1, kappa1 = 1.1, kappa2 = 1.9.
CoefficientModel standard_model();

/// b = sigma = 0: the pure heat equation.
CoefficientModel heat_only_model();

struct ValidationReport {
    double worst_b_ratio = 0.0;      ///< max |b(u)-b(v)|/|u-v| over samples
    double worst_sigma_ratio = 0.0;  ///< max |s(u)-s(v)|/|u-v| over samples
    double min_abs_sigma = 0.0;
    double max_abs_sigma = 0.0;
    bool lipschitz_b = false;
    bool lipschitz_sigma = false;
    bool sigma_bounds = false;
    bool kappa_order = false;  ///< 0 < kappa1 < kappa2
    bool penalty_shape = false;
    bool pass = false;
    std::vector<std::string> failures;
};

/// Sampled check of the Lipschitz, diffusion-bound and penalty assumptions on
/// [lo, hi] using 10^4 deterministic pairs. Ratios may exceed the declared
/// constants by at most 1e-9 relative.
ValidationReport validate_model(const CoefficientModel& model, double lo, double hi);

/// max{3, 9 Ls^2/sqrt(pi), 8 Lb^2/Ls^4, 144 Lb^2/(Ls^2 sqrt(pi)), 864 Lb^2/sqrt(pi)}.
/// Throws DegenerateDiffusion when L_sigma <= 0.
double constant_M(double L_b, double L_sigma);

/// zeta(t) = t^{1/2} + (9 Ls^4/4) t + (3 Lb^2/2) t^2 + (18 Lb^2 Ls^2/(5 sqrt(pi))) t^{5/2}.
double zeta(double t, double L_b, double L_sigma);

/// M and zeta for a fixed pair of Lipschitz constants, plus the growth
/// integrals of exp(-zeta) and exp(zeta).
class BoundProfile {
public:
    BoundProfile(double L_b, double L_sigma);

    double L_b() const noexcept { return L_b_; }
    double L_sigma() const noexcept { return L_sigma_; }
    double M() const noexcept { return M_; }
    double zeta(double t) const;
    /// int_0^t exp(-zeta(s)) ds, adaptive Simpson to 1e-8 relative.
    double integral_exp_neg_zeta(double t) const;
    /// int_0^t exp(zeta(s)) ds.
    double integral_exp_zeta(double t) const;

private:
    double L_b_;
    double L_sigma_;
    double M_;
};

/// M dist2 / (kappa1^2 int_0^t exp(-zeta)). Throws DomainError when t <= 0
/// or dist2 < 0.
double harnack_rhs(double t, double dist2, const BoundProfile& profile, double kappa1);

/// Left side of the short-time condition defining t0(eps).
double t0_condition(double t, double eps, double L_b, double L_sigma);

/// sup{t > 0 : t0_condition(t) <= 1/6}, by bisection to 1e-10. Returns 0 when
/// the condition already fails at t = 1e-12. Throws DomainError when eps <= 0.
double t0_eps(double eps, double L_b, double L_sigma);

}  // namespace rspde
