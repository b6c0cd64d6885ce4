#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rspde/coefficients.hpp"
#include "rspde/field.hpp"
#include "rspde/semigroup.hpp"

namespace rspde {

/// Settings shared by the inequality checkers.
struct CheckConfig {
    EstimatorSetup setup;                ///< mode is normally Reflected{}
    double m_scale = 1.0;                ///< multiplies M; < 1 only for fail injection
    double delta = 0.0;                  ///< finite-difference step; 0 = default_delta(h)
    std::vector<Field> directions;       ///< empty = e_1..e_8
    double n_sigma = 3.0;                ///< width of the Monte Carlo slack
};

/// One pass/fail record. Every checker is one-sided: PASS iff
/// lhs <= rhs + slack, with slack = n_sigma * sqrt(lhs_se^2 + rhs_se^2)
/// + 5 (dt + dx^2) max(|lhs|, |rhs|).
struct CheckReport {
    std::string check;
    std::vector<std::pair<std::string, double>> inputs;
    std::vector<std::pair<std::string, std::string>> labels;
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    double slack = 0.0;
    double margin_ratio = 0.0;  ///< rhs / lhs (+inf when lhs == 0)
    bool pass = false;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::vector<std::pair<std::string, double>> details;
    std::vector<std::string> notices;

    double detail(const std::string& key) const;
};

/// JSON {check, inputs, lhs, rhs, std_errors, margin_ratio, verdict, seed, config_hash, ...}.
std::string to_json(const CheckReport& report);

/// Gradient estimate: (grad proxy)^2 <= 2 M e^{zeta(t)} P_t |grad Phi|^2.
CheckReport check_gradient_estimate(const Functional& phi, const Field& h, double t, const CheckConfig& config);

/// Log-Harnack: P_t log Phi(h1) <= log P_t Phi(h2) + M |h1-h2|^2 / (kappa1^2 int_0^t e^{-zeta}).
CheckReport check_log_harnack(const Functional& phi, const Field& h1, const Field& h2, double t,
                              const CheckConfig& config);

/// Variance: P_t Phi^2 - (P_t Phi)^2 <= 2 M kappa2^2 P_t |grad Phi|^2 int_0^t e^{zeta}.
CheckReport check_variance_bound(const Functional& phi, const Field& h, double t, const CheckConfig& config);

/// Lipschitz / strong Feller: (grad proxy)^2 <= 2 M Var / (kappa1^2 int_0^t e^{-zeta}).
CheckReport check_lipschitz_Pt(const Functional& phi, const Field& h, double t, const CheckConfig& config);

/// Continuity in the initial value: E[sup_{[0,T]x[0,1]} |u(h1)-u(h2)|^p] / |h1-h2|_inf^p
/// over the ladder h2(lambda) = h1 + lambda (h2 - h1), lambda in {1, 1/2, 1/4}
/// (coupled noise). PASS iff max ratio < 2 * min ratio. The sup runs over every
/// step of [0, t_final] and every node.
CheckReport check_initial_continuity(const Field& h1, const Field& h2, double t_final, double p,
                                     const CheckConfig& config, const std::vector<double>& ladder = {1.0, 0.5, 0.25});

/// Pathwise comparison u^{eps_fine} >= u^{eps_coarse} - 5 (dt + dx^2) scale under
/// coupled noise at every step and node; PASS iff the violating fraction is
/// below 1e-3. scale is the running max |u| of the pair.
CheckReport check_eps_monotonicity(const Field& h, double eps_coarse, double eps_fine, const CheckConfig& config);

struct ConvergenceRow {
    double eps = 0.0;
    MCEstimate sup_distance;  ///< E sup_{t,x} |u^eps - u|
};

/// Penalisation convergence: E sup|u^eps - u| against the reflected path under
/// coupled noise for each eps (in the given order, largest first). PASS iff
/// the distance decreases along the ladder and the reflected path never goes
/// negative. Rows are appended to `rows` when non-null.
CheckReport check_penalization_convergence(const Field& h, const std::vector<double>& eps_ladder,
                                           const CheckConfig& config, std::vector<ConvergenceRow>* rows = nullptr);

/// Tangent flow against the coupled finite difference (u(t; h + delta k) - u(t; h)) / delta
/// at time t, penalised mode with the given eps. lhs = max over paths of the
/// relative L2 error, rhs = tolerance.
CheckReport check_tangent_consistency(const Field& h, const Field& k, double eps, double t, double fd_delta,
                                      const CheckConfig& config, double tolerance = 0.01);

/// Lipschitz stability of the deterministic obstacle problem for one pair:
/// lhs = |z1 - z2|_{T,inf}, rhs = 2 |v1 - v2|_{T,inf}.
CheckReport check_obstacle_stability(const std::vector<Field>& v1, const std::vector<Field>& v2,
                                     const SpaceTimeGrid& grid);

using ScalarFunction = std::function<double(double)>;

/// alpha(t) + beta(t) int_0^t alpha(s) gamma(s) exp(int_s^t beta gamma) ds by
/// nested adaptive quadrature. Throws DomainError on negative samples or t < 0.
double gronwall_bound(const ScalarFunction& alpha, const ScalarFunction& beta, const ScalarFunction& gamma, double t);

/// Least-squares exponent of E|u(x + l) - u(x)|^2 ~ l^{2 theta} over
/// l = dx, 2dx, 4dx, 8dx, pooled over the given fields. Diagnostic only.
double spatial_holder_exponent(const std::vector<Field>& fields, double dx);

}  // namespace rspde
