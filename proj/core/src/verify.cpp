#include "rspde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "rspde/errors.hpp"
#include "rspde/parallel.hpp"
#include "rspde/quadrature.hpp"
#include "rspde/solver.hpp"

namespace rspde {

double CheckReport::detail(const std::string& key) const {
    for (const auto& [k, v] : details)
        if (k == key) return v;
    throw InvalidArgument("report has no detail '" + key + "'");
}

namespace {

double discretisation_allowance(const SpaceTimeGrid& grid) { return 5.0 * (grid.dt + grid.dx * grid.dx); }

void finalize_one_sided(CheckReport& r, const CheckConfig& cfg) {
    r.slack = cfg.n_sigma * std::hypot(r.lhs_se, r.rhs_se) +
              discretisation_allowance(cfg.setup.grid) * std::max(std::abs(r.lhs), std::abs(r.rhs));
    r.pass = r.lhs <= r.rhs + r.slack;
    r.margin_ratio = r.lhs == 0.0 ? std::numeric_limits<double>::infinity() : r.rhs / r.lhs;
    r.seed = cfg.setup.seed;
}

void require_assumption_a3(const CoefficientModel& model) {
    if (!(model.kappa1 > 0.0 && model.kappa1 < model.kappa2))
        throw InvalidArgument("checker needs declared 0 < kappa1 < kappa2 for model '" + model.name + "'");
}

double effective_M(const CheckConfig& cfg) {
    return cfg.m_scale * constant_M(cfg.setup.model.L_b, cfg.setup.model.L_sigma);
}

std::vector<Field> directions_or_default(const CheckConfig& cfg) {
    if (!cfg.directions.empty()) return cfg.directions;
    return direction_dictionary(cfg.setup.grid.n_space, 8, false);
}

GradientEstimate gradient_proxy(const Functional& phi, const Field& h, double t, const CheckConfig& cfg) {
    const double delta = cfg.delta > 0.0 ? cfg.delta : default_delta(h, cfg.setup.grid.dx);
    return estimate_grad_Pt(phi, h, t, directions_or_default(cfg), delta, cfg.setup, true);
}

std::vector<double> squared_gradients(const Functional& phi, const std::vector<Field>& states) {
    std::vector<double> g(states.size());
    for (std::size_t j = 0; j < states.size(); ++j) {
        const double v = phi.grad_norm(states[j]);
        g[j] = v * v;
    }
    return g;
}

void add_common_inputs(CheckReport& r, double t, const CheckConfig& cfg) {
    const auto& m = cfg.setup.model;
    r.inputs = {{"t", t},
                {"n_space", static_cast<double>(cfg.setup.grid.n_space)},
                {"dt", cfg.setup.grid.dt},
                {"n_paths", static_cast<double>(cfg.setup.n_paths)},
                {"L_b", m.L_b},
                {"L_sigma", m.L_sigma},
                {"kappa1", m.kappa1},
                {"kappa2", m.kappa2},
                {"m_scale", cfg.m_scale}};
    r.labels = {{"model", m.name}, {"mode", describe(cfg.setup.mode)}};
}

SpaceTimeGrid horizon(const SpaceTimeGrid& grid, double t) {
    SpaceTimeGrid g = grid;
    g.n_steps = step_index(grid, t);
    return g;
}

}  // namespace

std::string to_json(const CheckReport& r) {
    nlohmann::ordered_json j;
    j["check"] = r.check;
    auto& inputs = j["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    for (const auto& [k, v] : r.labels) inputs[k] = v;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["std_errors"] = {{"lhs", r.lhs_se}, {"rhs", r.rhs_se}};
    j["slack"] = r.slack;
    if (std::isfinite(r.margin_ratio))
        j["margin_ratio"] = r.margin_ratio;
    else
        j["margin_ratio"] = nullptr;
    j["verdict"] = r.pass ? "PASS" : "FAIL";
    j["seed"] = r.seed;
    j["config_hash"] = r.config_hash;
    auto& details = j["details"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.details) {
        if (std::isfinite(v))
            details[k] = v;
        else
            details[k] = nullptr;
    }
    j["notices"] = r.notices;
    return j.dump(2);
}

CheckReport check_gradient_estimate(const Functional& phi, const Field& h, double t, const CheckConfig& cfg) {
    if (!phi.is_c1()) throw InvalidArgument("gradient check needs a C^1 functional, got " + phi.describe());
    require_assumption_a3(cfg.setup.model);
    const BoundProfile profile(cfg.setup.model.L_b, cfg.setup.model.L_sigma);

    CheckReport r;
    r.check = "gradient";
    add_common_inputs(r, t, cfg);
    const auto grad = gradient_proxy(phi, h, t, cfg);
    const auto states = simulate_ensemble(h, t, cfg.setup);
    const auto pt_grad2 = summarize(squared_gradients(phi, states), cfg.setup.seed);

    const double factor = 2.0 * effective_M(cfg) * std::exp(profile.zeta(t));
    r.lhs = grad.value * grad.value;
    r.lhs_se = 2.0 * grad.value * grad.std_error;
    r.rhs = factor * pt_grad2.mean;
    r.rhs_se = factor * pt_grad2.std_error;
    r.details = {{"grad_proxy", grad.value},
                 {"grad_proxy_se", grad.std_error},
                 {"best_direction", static_cast<double>(grad.best_direction)},
                 {"Pt_grad_phi_sq", pt_grad2.mean},
                 {"M", effective_M(cfg)},
                 {"zeta", profile.zeta(t)}};
    r.notices = grad.notices;
    finalize_one_sided(r, cfg);
    return r;
}

CheckReport check_log_harnack(const Functional& phi, const Field& h1, const Field& h2, double t,
                              const CheckConfig& cfg) {
    if (!(t > 0.0)) throw DomainError("log-Harnack check needs t > 0");
    require_assumption_a3(cfg.setup.model);
    const BoundProfile profile(cfg.setup.model.L_b, cfg.setup.model.L_sigma);

    CheckReport r;
    r.check = "log-harnack";
    add_common_inputs(r, t, cfg);
    const auto log_est = estimate_Pt_log(phi, h1, t, cfg.setup);
    const auto est2 = estimate_Pt(phi, h2, t, cfg.setup);
    const double dist2 = std::pow(l2_norm(h1 - h2, cfg.setup.grid.dx), 2);
    const double additive = cfg.m_scale * harnack_rhs(t, dist2, profile, cfg.setup.model.kappa1);

    r.lhs = log_est.mean;
    r.lhs_se = log_est.std_error;
    r.rhs = std::log(est2.mean) + additive;
    r.rhs_se = est2.std_error / est2.mean;  // delta method for log
    r.details = {{"Pt_log_phi_h1", log_est.mean},
                 {"Pt_phi_h2", est2.mean},
                 {"dist2", dist2},
                 {"harnack_term", additive},
                 {"integral_exp_neg_zeta", profile.integral_exp_neg_zeta(t)}};
    finalize_one_sided(r, cfg);
    // Both sides are logarithms; the margin is reported on the Phi scale.
    r.margin_ratio = std::exp(r.rhs - r.lhs);
    return r;
}

CheckReport check_variance_bound(const Functional& phi, const Field& h, double t, const CheckConfig& cfg) {
    if (!phi.is_c1()) throw InvalidArgument("variance check needs a C^1 functional, got " + phi.describe());
    require_assumption_a3(cfg.setup.model);
    const BoundProfile profile(cfg.setup.model.L_b, cfg.setup.model.L_sigma);

    CheckReport r;
    r.check = "variance";
    add_common_inputs(r, t, cfg);
    const auto states = simulate_ensemble(h, t, cfg.setup);
    const auto values = evaluate(phi, states);
    const auto var = variance_of(values, cfg.setup.seed);
    const auto pt_grad2 = summarize(squared_gradients(phi, states), cfg.setup.seed);
    const double k2 = cfg.setup.model.kappa2;
    const double growth = profile.integral_exp_zeta(t);
    const double factor = 2.0 * effective_M(cfg) * k2 * k2 * growth;

    r.lhs = var.mean;
    r.lhs_se = var.std_error;
    r.rhs = factor * pt_grad2.mean;
    r.rhs_se = factor * pt_grad2.std_error;
    r.details = {{"variance", var.mean}, {"Pt_grad_phi_sq", pt_grad2.mean}, {"integral_exp_zeta", growth}};
    finalize_one_sided(r, cfg);
    return r;
}

CheckReport check_lipschitz_Pt(const Functional& phi, const Field& h, double t, const CheckConfig& cfg) {
    if (!(t > 0.0)) throw DomainError("Lipschitz check needs t > 0");
    require_assumption_a3(cfg.setup.model);
    const BoundProfile profile(cfg.setup.model.L_b, cfg.setup.model.L_sigma);

    CheckReport r;
    r.check = "lipschitz";
    add_common_inputs(r, t, cfg);
    const auto grad = gradient_proxy(phi, h, t, cfg);
    const auto var = variance_of(evaluate(phi, simulate_ensemble(h, t, cfg.setup)), cfg.setup.seed);
    const double k1 = cfg.setup.model.kappa1;
    const double integral = profile.integral_exp_neg_zeta(t);
    const double factor = 2.0 * effective_M(cfg) / (k1 * k1 * integral);

    r.lhs = grad.value * grad.value;
    r.lhs_se = 2.0 * grad.value * grad.std_error;
    r.rhs = factor * var.mean;
    r.rhs_se = factor * var.std_error;
    r.details = {{"grad_proxy", grad.value},
                 {"grad_proxy_se", grad.std_error},
                 {"variance", var.mean},
                 {"integral_exp_neg_zeta", integral}};
    r.notices = grad.notices;
    finalize_one_sided(r, cfg);
    return r;
}

CheckReport check_initial_continuity(const Field& h1, const Field& h2, double t_final, double p,
                                     const CheckConfig& cfg, const std::vector<double>& ladder) {
    if (!(p >= 1.0)) throw InvalidArgument("continuity check needs p >= 1");
    if (ladder.empty()) throw InvalidArgument("continuity ladder must be nonempty");
    const SpaceTimeGrid grid = horizon(cfg.setup.grid, t_final);
    const auto& setup = cfg.setup;

    CheckReport r;
    r.check = "continuity";
    add_common_inputs(r, t_final, cfg);
    r.inputs.emplace_back("p", p);
    r.seed = setup.seed;

    const Field diff = h2 - h1;
    double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
    double se_at_max = 0.0, se_at_min = 0.0;
    bool degenerate = false;
    for (std::size_t rung = 0; rung < ladder.size(); ++rung) {
        const Field other = h1 + ladder[rung] * diff;
        const double s = sup_distance(other, h1);
        std::vector<double> sups(setup.n_paths);
        parallel_for(
            setup.n_paths,
            [&](std::size_t j) {
                const NoisePlan plan{setup.seed, j};
                PathIntegrator a(h1, setup.mode, setup.model, grid, plan);
                PathIntegrator b(other, setup.mode, setup.model, grid, couple(plan));
                double sup = sup_distance(a.state(), b.state());
                while (a.step() < grid.n_steps) {
                    a.advance();
                    b.advance();
                    sup = std::max(sup, sup_distance(a.state(), b.state()));
                }
                sups[j] = std::pow(sup, p);
            },
            setup.workers);
        const auto est = summarize(sups, setup.seed);
        const std::string tag = "rung" + std::to_string(rung);
        r.details.emplace_back(tag + "_sup_diff", s);
        r.details.emplace_back(tag + "_moment", est.mean);
        if (s == 0.0) {
            degenerate = true;
            r.details.emplace_back(tag + "_ratio", 0.0);
            continue;
        }
        const double scale = std::pow(s, p);
        const double ratio = est.mean / scale;
        r.details.emplace_back(tag + "_ratio", ratio);
        r.details.emplace_back(tag + "_ratio_se", est.std_error / scale);
        if (ratio > max_ratio) { max_ratio = ratio; se_at_max = est.std_error / scale; }
        if (ratio < min_ratio) { min_ratio = ratio; se_at_min = est.std_error / scale; }
    }
    if (degenerate || max_ratio == 0.0) {
        // h1 == h2: coupled trajectories coincide and every moment is exactly 0.
        r.lhs = 0.0;
        r.rhs = 0.0;
        r.pass = true;
        r.margin_ratio = std::numeric_limits<double>::infinity();
        r.notices.push_back("identical initial data: difference vanishes identically");
        return r;
    }
    // Spread gate: max ratio < 2 min ratio, no extra slack.
    r.lhs = max_ratio;
    r.rhs = 2.0 * min_ratio;
    r.lhs_se = se_at_max;
    r.rhs_se = 2.0 * se_at_min;
    r.pass = r.lhs < r.rhs;
    r.margin_ratio = r.rhs / r.lhs;
    return r;
}

CheckReport check_eps_monotonicity(const Field& h, double eps_coarse, double eps_fine, const CheckConfig& cfg) {
    if (!(eps_fine < eps_coarse)) throw InvalidArgument("need eps_fine < eps_coarse");
    const auto& setup = cfg.setup;
    const SpaceTimeGrid& grid = setup.grid;
    const double allowance = discretisation_allowance(grid);

    std::vector<double> violations(setup.n_paths), worst(setup.n_paths);
    parallel_for(
        setup.n_paths,
        [&](std::size_t j) {
            const NoisePlan plan{setup.seed, j};
            PathIntegrator coarse(h, Penalized{eps_coarse}, setup.model, grid, plan);
            PathIntegrator fine(h, Penalized{eps_fine}, setup.model, grid, couple(plan));
            std::size_t count = 0;
            double deficit = 0.0;
            while (coarse.step() < grid.n_steps) {
                coarse.advance();
                fine.advance();
                const double tol = allowance * std::max(coarse.running_max_abs(), fine.running_max_abs());
                for (std::size_t i = 0; i < grid.n_space; ++i) {
                    const double gap = coarse.state()[i] - fine.state()[i];
                    deficit = std::max(deficit, gap);
                    if (gap > tol) ++count;
                }
            }
            violations[j] = static_cast<double>(count);
            worst[j] = deficit;
        },
        setup.workers);

    const double total = static_cast<double>(setup.n_paths * grid.n_steps * grid.n_space);
    CheckReport r;
    r.check = "comparison";
    add_common_inputs(r, grid.t_final(), cfg);
    r.inputs.emplace_back("eps_coarse", eps_coarse);
    r.inputs.emplace_back("eps_fine", eps_fine);
    r.lhs = pairwise_sum(violations) / total;
    r.rhs = 1e-3;
    r.pass = r.lhs < r.rhs;
    r.margin_ratio = r.lhs == 0.0 ? std::numeric_limits<double>::infinity() : r.rhs / r.lhs;
    r.seed = setup.seed;
    r.details = {{"violations", pairwise_sum(violations)},
                 {"grid_points", total},
                 {"max_deficit", *std::max_element(worst.begin(), worst.end())}};
    return r;
}

CheckReport check_penalization_convergence(const Field& h, const std::vector<double>& eps_ladder,
                                           const CheckConfig& cfg, std::vector<ConvergenceRow>* rows) {
    if (eps_ladder.size() < 2) throw InvalidArgument("convergence ladder needs at least two eps values");
    const auto& setup = cfg.setup;
    const SpaceTimeGrid& grid = setup.grid;
    const std::size_t m = eps_ladder.size();

    std::vector<std::vector<double>> dist(m, std::vector<double>(setup.n_paths));
    std::vector<double> reflected_min(setup.n_paths);
    parallel_for(
        setup.n_paths,
        [&](std::size_t j) {
            const NoisePlan plan{setup.seed, j};
            PathIntegrator reflected(h, Reflected{}, setup.model, grid, plan);
            std::vector<PathIntegrator> penalized;
            penalized.reserve(m);
            for (double eps : eps_ladder) penalized.emplace_back(h, Penalized{eps}, setup.model, grid, couple(plan));
            std::vector<double> sup(m, 0.0);
            double lowest = *std::min_element(h.begin(), h.end());
            while (reflected.step() < grid.n_steps) {
                reflected.advance();
                lowest = std::min(lowest, *std::min_element(reflected.state().begin(), reflected.state().end()));
                for (std::size_t k = 0; k < m; ++k) {
                    penalized[k].advance();
                    sup[k] = std::max(sup[k], sup_distance(penalized[k].state(), reflected.state()));
                }
            }
            for (std::size_t k = 0; k < m; ++k) dist[k][j] = sup[k];
            reflected_min[j] = lowest;
        },
        setup.workers);

    CheckReport r;
    r.check = "converge-eps";
    add_common_inputs(r, grid.t_final(), cfg);
    r.seed = setup.seed;
    bool decreasing = true;
    double worst_ratio = 0.0;
    std::vector<MCEstimate> est(m);
    for (std::size_t k = 0; k < m; ++k) {
        est[k] = summarize(dist[k], setup.seed);
        r.inputs.emplace_back("eps" + std::to_string(k), eps_ladder[k]);
        r.details.emplace_back("sup_distance" + std::to_string(k), est[k].mean);
        if (rows) rows->push_back({eps_ladder[k], est[k]});
        if (k > 0) {
            const double ratio = est[k].mean / est[k - 1].mean;
            worst_ratio = std::max(worst_ratio, ratio);
            if (!(est[k].mean < est[k - 1].mean)) decreasing = false;
        }
    }
    const double min_reflected = *std::min_element(reflected_min.begin(), reflected_min.end());
    r.details.emplace_back("reflected_min", min_reflected);
    r.lhs = worst_ratio;
    r.rhs = 1.0;
    r.pass = decreasing && min_reflected >= 0.0;
    r.margin_ratio = worst_ratio > 0.0 ? 1.0 / worst_ratio : std::numeric_limits<double>::infinity();
    if (min_reflected < 0.0) r.notices.push_back("reflected path went negative");
    return r;
}

CheckReport check_tangent_consistency(const Field& h, const Field& k, double eps, double t, double fd_delta,
                                      const CheckConfig& cfg, double tolerance) {
    const auto& setup = cfg.setup;
    const SpaceTimeGrid grid = horizon(setup.grid, t);
    const Field shifted = h + fd_delta * k;
    if (!is_nonnegative(shifted)) throw InvalidArgument("h + delta k leaves K0");

    std::vector<double> errors(setup.n_paths), min_tangent(setup.n_paths);
    parallel_for(
        setup.n_paths,
        [&](std::size_t j) {
            const NoisePlan plan{setup.seed, j};
            const auto tangent = solve_tangent_lockstep(h, k, eps, setup.model, grid, plan, {t});
            const auto base = solve_path(h, Penalized{eps}, setup.model, grid, plan, {t});
            const auto bumped = solve_path(shifted, Penalized{eps}, setup.model, grid, couple(plan), {t});
            Field fd = bumped.final_state() - base.final_state();
            fd *= 1.0 / fd_delta;
            const Field& v = tangent.final_state();
            errors[j] = l2_norm(v - fd, grid.dx) / l2_norm(v, grid.dx);
            min_tangent[j] = *std::min_element(v.begin(), v.end());
        },
        setup.workers);

    CheckReport r;
    r.check = "tangent";
    add_common_inputs(r, t, cfg);
    r.inputs.emplace_back("eps", eps);
    r.inputs.emplace_back("fd_delta", fd_delta);
    r.seed = setup.seed;
    r.lhs = *std::max_element(errors.begin(), errors.end());
    r.rhs = tolerance;
    r.pass = r.lhs < r.rhs;
    r.margin_ratio = r.lhs == 0.0 ? std::numeric_limits<double>::infinity() : r.rhs / r.lhs;
    r.details = {{"mean_rel_error", pairwise_sum(errors) / static_cast<double>(errors.size())},
                 {"min_tangent", *std::min_element(min_tangent.begin(), min_tangent.end())}};
    return r;
}

CheckReport check_obstacle_stability(const std::vector<Field>& v1, const std::vector<Field>& v2,
                                     const SpaceTimeGrid& grid) {
    if (v1.size() != v2.size()) throw InvalidArgument("obstacle inputs differ in length");
    const auto s1 = deterministic_obstacle(v1, grid);
    const auto s2 = deterministic_obstacle(v2, grid);
    double dz = 0.0, dv = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < v1.size(); ++n) {
        dz = std::max(dz, sup_distance(s1.z[n], s2.z[n]));
        dv = std::max(dv, sup_distance(v1[n], v2[n]));
        scale = std::max({scale, sup_norm(v1[n]), sup_norm(v2[n])});
    }
    CheckReport r;
    r.check = "obstacle-stability";
    r.inputs = {{"n_space", static_cast<double>(grid.n_space)}, {"dt", grid.dt}, {"t_final", grid.t_final()}};
    r.lhs = dz;
    r.rhs = 2.0 * dv;
    r.slack = discretisation_allowance(grid) * scale;
    r.pass = r.lhs <= r.rhs + r.slack;
    r.margin_ratio = dz == 0.0 ? std::numeric_limits<double>::infinity() : r.rhs / r.lhs;
    r.details = {{"complementarity1", s1.ledger.complementarity()},
                 {"complementarity2", s2.ledger.complementarity()},
                 {"mass1", s1.ledger.total()},
                 {"mass2", s2.ledger.total()}};
    return r;
}

double gronwall_bound(const ScalarFunction& alpha, const ScalarFunction& beta, const ScalarFunction& gamma, double t) {
    if (!(t >= 0.0)) throw DomainError("gronwall_bound: t must be nonnegative");
    auto sample = [](const ScalarFunction& f, double s, const char* name) {
        const double v = f(s);
        if (!(v >= 0.0)) throw DomainError(std::string("gronwall_bound: negative sample of ") + name);
        return v;
    };
    const double a_t = sample(alpha, t, "alpha");
    const double b_t = sample(beta, t, "beta");
    if (t == 0.0 || b_t == 0.0) return a_t;
    auto bg = [&](double s) { return sample(beta, s, "beta") * sample(gamma, s, "gamma"); };
    auto outer = [&](double s) {
        const double growth = adaptive_simpson(bg, s, t, 1e-10, 30);
        return sample(alpha, s, "alpha") * sample(gamma, s, "gamma") * std::exp(growth);
    };
    return a_t + b_t * adaptive_simpson(outer, 0.0, t, 1e-10, 30);
}

double spatial_holder_exponent(const std::vector<Field>& fields, double dx) {
    std::vector<double> logs, logl;
    for (std::size_t lag : {1u, 2u, 4u, 8u}) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& f : fields) {
            for (std::size_t i = 0; i + lag < f.size(); ++i) {
                const double d = f[i + lag] - f[i];
                sum += d * d;
                ++count;
            }
        }
        if (count == 0 || sum == 0.0) continue;
        logs.push_back(std::log(sum / static_cast<double>(count)));
        logl.push_back(std::log(static_cast<double>(lag) * dx));
    }
    if (logs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(logs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) { mx += logl[i]; my += logs[i]; }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        sxy += (logl[i] - mx) * (logs[i] - my);
        sxx += (logl[i] - mx) * (logl[i] - mx);
    }
    return 0.5 * sxy / sxx;
}

}  // namespace rspde
