#include "rspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde {

std::string describe(const Mode& mode) {
    if (const auto* p = std::get_if<Penalized>(&mode)) {
        std::ostringstream os;
        os << "penalized(eps=" << p->eps << ")";
        return os.str();
    }
    return "reflected";
}

// ReflectionLedger ---------------------------------------------------------

ReflectionLedger::ReflectionLedger(std::size_t n_space, bool record_cells)
    : node_mass_(n_space, 0.0), record_cells_(record_cells) {}

void ReflectionLedger::record(std::span<const double> mass, std::span<const double> post_state) {
    if (mass.size() != node_mass_.size() || post_state.size() != node_mass_.size())
        throw InvalidArgument("ReflectionLedger::record: size mismatch");
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const double m = mass[i];
        if (!std::isfinite(m)) finite_ = false;
        node_mass_[i] += m;
        total_ += m;
        if (steps_ == 0 && i == 0)
            min_cell_ = m;
        else
            min_cell_ = std::min(min_cell_, m);
        complementarity_ += post_state[i] * m;
        if (m > 0.0) max_state_on_support_ = std::max(max_state_on_support_, std::abs(post_state[i]));
    }
    if (record_cells_) cells_.insert(cells_.end(), mass.begin(), mass.end());
    ++steps_;
}

std::span<const double> ReflectionLedger::cells_at(std::size_t step) const {
    if (!record_cells_ || step >= steps_) throw InvalidArgument("ReflectionLedger: no cells recorded for step");
    return std::span<const double>(cells_).subspan(step * n_space(), n_space());
}

// Steps --------------------------------------------------------------------

void explicit_then_implicit(std::span<const double> u, const CoefficientModel& model, const SpaceTimeGrid& grid,
                            const ImplicitHeatStep& heat, std::span<const double> dW, std::span<double> v,
                            std::span<double> scratch) {
    const double dt = grid.dt;
    const double inv_dx = 1.0 / grid.dx;
    for (std::size_t i = 0; i < u.size(); ++i)
        scratch[i] = u[i] + dt * model.b(u[i]) + model.sigma(u[i]) * dW[i] * inv_dx;
    heat.apply(scratch, v);
}

double penalty_resolvent(PenaltyKind kind, double v, double dt_over_eps) {
    if (v >= 0.0) return v;
    switch (kind) {
        case PenaltyKind::negative_part: return v / (1.0 + dt_over_eps);
        case PenaltyKind::arctan_square: {
            // g(x) = x - v - k atan(x^2) is increasing on [v, 0] with g(v) <= 0 < g(0).
            double lo = v, hi = 0.0, x = v;
            for (int it = 0; it < 100; ++it) {
                const double x2 = x * x;
                const double g = x - v - dt_over_eps * std::atan(x2);
                if (g < 0.0) lo = x; else hi = x;
                const double dg = 1.0 - dt_over_eps * 2.0 * x / (1.0 + x2 * x2);
                double next = x - g / dg;
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                if (std::abs(next - x) <= 1e-12) return next;
                x = next;
            }
            return x;
        }
    }
    return v;
}

namespace {

void check_finite(std::span<const double> out, std::span<const double> before, std::size_t step) {
    if (!all_finite(out)) throw BlowUpError(step, sup_norm(before));
}

}  // namespace

void step_penalized(std::span<const double> u, double eps, const CoefficientModel& model, const SpaceTimeGrid& grid,
                    const ImplicitHeatStep& heat, std::span<const double> dW, std::span<double> out,
                    StepWorkspace& ws, std::size_t step) {
    if (!(eps > 0.0)) throw InvalidArgument("step_penalized: eps must be positive");
    ws.w.resize(u.size());
    explicit_then_implicit(u, model, grid, heat, dW, out, ws.w);
    const double k = grid.dt / eps;
    for (double& x : out) x = penalty_resolvent(model.penalty, x, k);
    check_finite(out, u, step);
}

Field step_penalized(const Field& u, double eps, const CoefficientModel& model, const SpaceTimeGrid& grid,
                     const Field& dW, std::size_t step) {
    const ImplicitHeatStep heat(grid);
    StepWorkspace ws;
    Field out(u.size());
    step_penalized(u, eps, model, grid, heat, dW, out.span(), ws, step);
    return out;
}

void project_nonnegative(std::span<const double> v, double dx, std::span<double> out, std::span<double> mass) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = v[i];
        if (x < 0.0) {
            out[i] = 0.0;
            mass[i] = -x * dx;
        } else {
            out[i] = x == 0.0 ? 0.0 : x;  // normalises -0.0
            mass[i] = 0.0;
        }
    }
}

void step_reflected(std::span<const double> u, const CoefficientModel& model, const SpaceTimeGrid& grid,
                    const ImplicitHeatStep& heat, std::span<const double> dW, std::span<double> out,
                    ReflectionLedger& ledger, StepWorkspace& ws, std::size_t step) {
    ws.w.resize(u.size());
    ws.v.resize(u.size());
    ws.mass.resize(u.size());
    explicit_then_implicit(u, model, grid, heat, dW, ws.v, ws.w);
    check_finite(ws.v, u, step);
    project_nonnegative(ws.v, grid.dx, out, ws.mass);
    ledger.record(ws.mass, out);
}

Field step_reflected(const Field& u, const CoefficientModel& model, const SpaceTimeGrid& grid, const Field& dW,
                     ReflectionLedger& ledger, std::size_t step) {
    const ImplicitHeatStep heat(grid);
    StepWorkspace ws;
    Field out(u.size());
    step_reflected(u, model, grid, heat, dW, out.span(), ledger, ws, step);
    return out;
}

// PathIntegrator -----------------------------------------------------------

PathIntegrator::PathIntegrator(Field h, Mode mode, const CoefficientModel& model, const SpaceTimeGrid& grid,
                               NoisePlan plan, bool record_ledger_cells)
    : model_(&model), grid_(grid), mode_(mode), plan_(plan), heat_(grid), u_(std::move(h)),
      next_(grid.n_space), dw_(grid.n_space) {
    if (u_.size() != grid.n_space) throw InvalidArgument("initial field size does not match grid");
    if (const auto* p = std::get_if<Penalized>(&mode_); p && !(p->eps > 0.0))
        throw InvalidArgument("penalized mode needs eps > 0");
    if (std::holds_alternative<Reflected>(mode_)) ledger_.emplace(grid.n_space, record_ledger_cells);
    running_max_ = sup_norm(u_);
}

void PathIntegrator::advance() {
    fill_increments(plan_, grid_, step_, dw_.span());
    try {
        if (const auto* p = std::get_if<Penalized>(&mode_))
            step_penalized(u_, p->eps, *model_, grid_, heat_, dw_, next_.span(), ws_, step_);
        else
            step_reflected(u_, *model_, grid_, heat_, dw_, next_.span(), *ledger_, ws_, step_);
    } catch (const BlowUpError& e) {
        throw BlowUpError(e.step(), e.max_abs(), plan_.stream_id);
    }
    std::swap(u_, next_);
    running_max_ = std::max(running_max_, sup_norm(u_));
    ++step_;
}

void PathIntegrator::advance_to(std::size_t target) {
    while (step_ < target) advance();
}

ReflectionLedger PathIntegrator::take_ledger() {
    ReflectionLedger out = ledger_ ? std::move(*ledger_) : ReflectionLedger(grid_.n_space);
    ledger_.reset();
    return out;
}

// Trajectories -------------------------------------------------------------

const Snapshot& Trajectory::at_time(double t) const {
    const std::size_t target = step_index(meta.grid, t);
    for (const auto& s : snapshots)
        if (s.step == target) return s;
    throw InvalidArgument("no snapshot saved at t = " + std::to_string(t));
}

std::vector<double> all_step_times(const SpaceTimeGrid& grid) {
    std::vector<double> times(grid.n_steps + 1);
    for (std::size_t n = 0; n <= grid.n_steps; ++n) times[n] = grid.time(n);
    return times;
}

namespace {

std::vector<std::size_t> save_steps(const SpaceTimeGrid& grid, const std::vector<double>& save_at) {
    std::vector<std::size_t> steps;
    if (save_at.empty()) return {grid.n_steps};
    steps.reserve(save_at.size());
    for (double t : save_at) {
        const std::size_t s = step_index(grid, t);
        if (s > grid.n_steps) throw InvalidArgument("save time beyond t_final");
        steps.push_back(s);
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}

void require_in_cone(const Field& h, const SpaceTimeGrid& grid, const char* what) {
    if (h.size() != grid.n_space) throw InvalidArgument(std::string(what) + " size does not match grid");
    if (!all_finite(h)) throw InvalidArgument(std::string(what) + " has non-finite entries");
    if (!is_nonnegative(h)) throw InvalidArgument(std::string(what) + " must be nonnegative (in K0)");
}

TrajectoryMeta make_meta(const Mode& mode, const CoefficientModel& model, const SpaceTimeGrid& grid,
                         const NoisePlan& plan) {
    TrajectoryMeta meta{plan, grid, model.name, std::nullopt};
    if (const auto* p = std::get_if<Penalized>(&mode)) meta.eps = p->eps;
    return meta;
}

}  // namespace

Trajectory solve_path(const Field& h, const Mode& mode, const CoefficientModel& model, const SpaceTimeGrid& grid,
                      const NoisePlan& plan, const std::vector<double>& save_at, bool record_ledger_cells) {
    require_in_cone(h, grid, "initial field");
    const auto steps = save_steps(grid, save_at);

    Trajectory traj;
    traj.meta = make_meta(mode, model, grid, plan);
    traj.snapshots.reserve(steps.size());

    PathIntegrator integ(h, mode, model, grid, plan, record_ledger_cells);
    for (std::size_t target : steps) {
        integ.advance_to(target);
        traj.snapshots.push_back({target, grid.time(target), integ.state()});
    }
    integ.advance_to(grid.n_steps);
    traj.running_max_abs = integ.running_max_abs();
    if (std::holds_alternative<Reflected>(mode)) traj.ledger = integ.take_ledger();
    return traj;
}

// Tangent ------------------------------------------------------------------

namespace {

void require_differentiable(const CoefficientModel& model) {
    if (!model.differentiable())
        throw UnsupportedModel("model '" + model.name + "' has no derivative; tangent flow unavailable");
}

// One tangent step along the frozen transition u_now -> u_next.
void tangent_step(std::span<const double> u_now, std::span<const double> u_next, std::span<const double> dW,
                  std::span<const double> v, double eps, const CoefficientModel& model, const SpaceTimeGrid& grid,
                  const ImplicitHeatStep& heat, std::span<double> scratch, std::span<double> out) {
    const double dt = grid.dt;
    const double inv_dx = 1.0 / grid.dx;
    for (std::size_t i = 0; i < v.size(); ++i)
        scratch[i] = v[i] * (1.0 + dt * model.db(u_now[i]) + model.dsigma(u_now[i]) * dW[i] * inv_dx);
    heat.apply(scratch, out);
    const double k = dt / eps;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double fp = penalty_derivative(model.penalty, u_next[i]);
        if (fp != 0.0) out[i] /= (1.0 - k * fp);
    }
}

}  // namespace

Trajectory solve_tangent(const Trajectory& u_path, const Field& k, double eps, const CoefficientModel& model,
                         const SpaceTimeGrid& grid, const NoisePlan& plan) {
    require_differentiable(model);
    if (!(eps > 0.0)) throw InvalidArgument("solve_tangent: eps must be positive");
    if (k.size() != grid.n_space) throw InvalidArgument("direction size does not match grid");
    if (!u_path.meta.eps || *u_path.meta.eps != eps)
        throw InvalidArgument("solve_tangent: base path must be penalized with the same eps");
    if (!(u_path.meta.plan == plan) || !(u_path.meta.grid == grid))
        throw InvalidArgument("solve_tangent: base path was produced with a different plan or grid");
    if (u_path.snapshots.size() != grid.n_steps + 1)
        throw InvalidArgument("solve_tangent: base path must be saved at every step");

    const ImplicitHeatStep heat(grid);
    Trajectory out;
    out.meta = u_path.meta;
    out.snapshots.reserve(u_path.snapshots.size());
    out.snapshots.push_back({0, 0.0, k});

    Field v = k, next(grid.n_space), dw(grid.n_space);
    std::vector<double> scratch(grid.n_space);
    double vmax = sup_norm(v);
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        fill_increments(plan, grid, n, dw.span());
        tangent_step(u_path.snapshots[n].u, u_path.snapshots[n + 1].u, dw, v, eps, model, grid, heat, scratch,
                     next.span());
        if (!all_finite(next)) throw BlowUpError(n, sup_norm(v), plan.stream_id);
        std::swap(v, next);
        vmax = std::max(vmax, sup_norm(v));
        out.snapshots.push_back({n + 1, grid.time(n + 1), v});
    }
    out.running_max_abs = vmax;
    return out;
}

Trajectory solve_tangent_lockstep(const Field& h, const Field& k, double eps, const CoefficientModel& model,
                                  const SpaceTimeGrid& grid, const NoisePlan& plan,
                                  const std::vector<double>& save_at) {
    require_differentiable(model);
    require_in_cone(h, grid, "initial field");
    if (k.size() != grid.n_space) throw InvalidArgument("direction size does not match grid");
    const auto steps = save_steps(grid, save_at);

    const ImplicitHeatStep heat(grid);
    PathIntegrator base(h, Penalized{eps}, model, grid, plan);
    Trajectory out;
    out.meta = make_meta(Penalized{eps}, model, grid, plan);

    Field v = k, next(grid.n_space), u_now(grid.n_space);
    std::vector<double> scratch(grid.n_space);
    double vmax = sup_norm(v);
    auto save_index = steps.begin();
    auto maybe_save = [&](std::size_t n) {
        if (save_index != steps.end() && *save_index == n) {
            out.snapshots.push_back({n, grid.time(n), v});
            ++save_index;
        }
    };
    maybe_save(0);
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        u_now = base.state();
        base.advance();
        tangent_step(u_now, base.state(), base.last_increment(), v, eps, model, grid, heat, scratch, next.span());
        if (!all_finite(next)) throw BlowUpError(n, sup_norm(v), plan.stream_id);
        std::swap(v, next);
        vmax = std::max(vmax, sup_norm(v));
        maybe_save(n + 1);
    }
    out.running_max_abs = vmax;
    return out;
}

// Deterministic obstacle ---------------------------------------------------

ObstacleSolution deterministic_obstacle(const std::vector<Field>& v, const SpaceTimeGrid& grid) {
    if (v.size() != grid.n_steps + 1) throw InvalidArgument("obstacle input must hold n_steps + 1 fields");
    for (const auto& f : v)
        if (f.size() != grid.n_space) throw InvalidArgument("obstacle field size does not match grid");
    if (!is_nonnegative(v.front())) throw InvalidArgument("obstacle input must start in K0");

    const ImplicitHeatStep heat(grid);
    ObstacleSolution sol{{}, ReflectionLedger(grid.n_space)};
    sol.z.reserve(v.size());
    sol.z.emplace_back(grid.n_space, 0.0);

    std::vector<double> zt(grid.n_space), mass(grid.n_space), gap(grid.n_space);
    for (std::size_t n = 0; n < grid.n_steps; ++n) {
        heat.apply(sol.z.back(), zt);
        const Field& obstacle = v[n + 1];
        Field z(grid.n_space);
        for (std::size_t i = 0; i < grid.n_space; ++i) {
            if (zt[i] + obstacle[i] < 0.0) {
                z[i] = -obstacle[i];
                mass[i] = (z[i] - zt[i]) * grid.dx;
            } else {
                z[i] = zt[i];
                mass[i] = 0.0;
            }
            gap[i] = z[i] + obstacle[i];
        }
        sol.ledger.record(mass, gap);
        sol.z.push_back(std::move(z));
    }
    return sol;
}

}  // namespace rspde
