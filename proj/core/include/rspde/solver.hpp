#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rspde/coefficients.hpp"
#include "rspde/field.hpp"
#include "rspde/grid_noise.hpp"
#include "rspde/heat.hpp"

namespace rspde {

/// Penalised equation with restoring drift (1/eps) f(u).
struct Penalized {
    double eps = 1e-2;
};
/// Reflected equation, Skorokhod projection onto u >= 0.
struct Reflected {};

using Mode = std::variant<Penalized, Reflected>;

std::string describe(const Mode& mode);

/// Discrete reflection measure: Delta eta at (step, node) is the mass added
/// by the projection, (v_i)^- dx.
class ReflectionLedger {
public:
    explicit ReflectionLedger(std::size_t n_space = 0, bool record_cells = false);

    /// Appends one step. mass and post_state have n_space entries.
    void record(std::span<const double> mass, std::span<const double> post_state);

    std::size_t n_space() const noexcept { return node_mass_.size(); }
    std::size_t steps() const noexcept { return steps_; }
    /// Mass aggregated over time, per node.
    const std::vector<double>& node_mass() const noexcept { return node_mass_; }
    double total() const noexcept { return total_; }
    /// Smallest single-cell mass recorded so far (0 before the first step).
    double min_cell_mass() const noexcept { return min_cell_; }
    /// sum over all recorded cells of post_state * mass; zero exactly when the
    /// measure only charges cells where the solution sits at 0.
    double complementarity() const noexcept { return complementarity_; }
    /// Largest |u| over cells carrying positive mass.
    double max_state_on_support() const noexcept { return max_state_on_support_; }
    bool all_finite() const noexcept { return finite_; }

    bool records_cells() const noexcept { return record_cells_; }
    /// Row-major (step, node) masses; empty unless constructed with record_cells.
    const std::vector<double>& cells() const noexcept { return cells_; }
    std::span<const double> cells_at(std::size_t step) const;

private:
    std::vector<double> node_mass_;
    std::vector<double> cells_;
    std::size_t steps_ = 0;
    double total_ = 0.0;
    double min_cell_ = 0.0;
    double complementarity_ = 0.0;
    double max_state_on_support_ = 0.0;
    bool finite_ = true;
    bool record_cells_ = false;
};

/// Per-step scratch shared by the step functions.
struct StepWorkspace {
    std::vector<double> w;
    std::vector<double> v;
    std::vector<double> mass;
};

/// Stage (1)-(2) of every step: w = u + dt b(u) + sigma(u) dW/dx, v = (I - dt D2/2)^{-1} w.
void explicit_then_implicit(std::span<const double> u, const CoefficientModel& model, const SpaceTimeGrid& grid,
                            const ImplicitHeatStep& heat, std::span<const double> dW, std::span<double> v,
                            std::span<double> scratch);

/// Nodewise solve of x = v + (dt/eps) f(x) (the penalty resolvent).
double penalty_resolvent(PenaltyKind kind, double v, double dt_over_eps);

/// One splitting step of the penalised equation. Throws BlowUpError (tagged
/// with `step`) when the result is not finite, InvalidArgument when eps <= 0.
void step_penalized(std::span<const double> u, double eps, const CoefficientModel& model,
                    const SpaceTimeGrid& grid, const ImplicitHeatStep& heat, std::span<const double> dW,
                    std::span<double> out, StepWorkspace& ws, std::size_t step = 0);
Field step_penalized(const Field& u, double eps, const CoefficientModel& model, const SpaceTimeGrid& grid,
                     const Field& dW, std::size_t step = 0);

/// One step of the reflected equation: stages (1)-(2), then projection
/// u' = max(v, 0) with Delta eta_i = (v_i)^- dx appended to the ledger.
void step_reflected(std::span<const double> u, const CoefficientModel& model, const SpaceTimeGrid& grid,
                    const ImplicitHeatStep& heat, std::span<const double> dW, std::span<double> out,
                    ReflectionLedger& ledger, StepWorkspace& ws, std::size_t step = 0);
Field step_reflected(const Field& u, const CoefficientModel& model, const SpaceTimeGrid& grid, const Field& dW,
                     ReflectionLedger& ledger, std::size_t step = 0);

/// Projection stage alone (used by step_reflected): out = max(v, 0), mass = (v)^- dx.
void project_nonnegative(std::span<const double> v, double dx, std::span<double> out, std::span<double> mass);

/// Time-stepping state of one trajectory. Draws increments from its plan;
/// the whole path is a pure function of (plan, grid, model, mode, h).
class PathIntegrator {
public:
    PathIntegrator(Field h, Mode mode, const CoefficientModel& model, const SpaceTimeGrid& grid, NoisePlan plan,
                   bool record_ledger_cells = false);
    /// The model is held by reference.
    PathIntegrator(Field, Mode, CoefficientModel&&, const SpaceTimeGrid&, NoisePlan, bool = false) = delete;

    /// Advances one step; throws BlowUpError on non-finite output.
    void advance();
    /// Advances until step() == target.
    void advance_to(std::size_t target);

    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return grid_.time(step_); }
    const Field& state() const noexcept { return u_; }
    const Field& last_increment() const noexcept { return dw_; }
    const ReflectionLedger* ledger() const noexcept { return ledger_ ? &*ledger_ : nullptr; }
    ReflectionLedger take_ledger();
    double running_max_abs() const noexcept { return running_max_; }
    const SpaceTimeGrid& grid() const noexcept { return grid_; }
    const NoisePlan& plan() const noexcept { return plan_; }
    const Mode& mode() const noexcept { return mode_; }

private:
    const CoefficientModel* model_;
    SpaceTimeGrid grid_;
    Mode mode_;
    NoisePlan plan_;
    ImplicitHeatStep heat_;
    StepWorkspace ws_;
    Field u_;
    Field next_;
    Field dw_;
    std::optional<ReflectionLedger> ledger_;
    std::size_t step_ = 0;
    double running_max_ = 0.0;
};

struct Snapshot {
    std::size_t step = 0;
    double t = 0.0;
    Field u;
};

struct TrajectoryMeta {
    NoisePlan plan;
    SpaceTimeGrid grid;
    std::string model;
    std::optional<double> eps;  ///< empty for the reflected mode
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::optional<ReflectionLedger> ledger;
    TrajectoryMeta meta;
    double running_max_abs = 0.0;  ///< max |u| over every step, not only snapshots

    const Snapshot& at_time(double t) const;
    const Field& final_state() const { return snapshots.back().u; }
};

/// Every grid time 0, dt, ..., t_final.
std::vector<double> all_step_times(const SpaceTimeGrid& grid);

/// Integrates from h over the whole grid horizon, saving snapshots at the
/// requested times (each a multiple of dt in [0, t_final]). An empty save_at
/// saves the final state only. Throws InvalidArgument if h is not in K0 or has
/// the wrong size; propagates BlowUpError with the stream id attached.
Trajectory solve_path(const Field& h, const Mode& mode, const CoefficientModel& model, const SpaceTimeGrid& grid,
                      const NoisePlan& plan, const std::vector<double>& save_at = {},
                      bool record_ledger_cells = false);

/// Tangent (directional derivative) of the penalised flow along a frozen path.
/// u_path must be a penalised trajectory with the same eps and plan, saved at
/// every step. Returns the derivative field at each snapshot time of u_path.
/// Throws UnsupportedModel when b or sigma lacks a derivative.
Trajectory solve_tangent(const Trajectory& u_path, const Field& k, double eps, const CoefficientModel& model,
                         const SpaceTimeGrid& grid, const NoisePlan& plan);

/// Same tangent, regenerating the base path in lockstep instead of reading a
/// stored one; identical output to solve_tangent by determinism.
Trajectory solve_tangent_lockstep(const Field& h, const Field& k, double eps, const CoefficientModel& model,
                                  const SpaceTimeGrid& grid, const NoisePlan& plan,
                                  const std::vector<double>& save_at = {});

struct ObstacleSolution {
    std::vector<Field> z;  ///< z at every grid step 0..n_steps
    ReflectionLedger ledger;
};

/// Deterministic obstacle problem: z(0) = 0, dz = (1/2) z'' dt + eta, z + v >= 0,
/// int (z + v) d eta = 0. v holds the obstacle at every grid step (n_steps + 1
/// fields) with v[0] in K0. Each step is an implicit heat step on z followed
/// by the projection of z + v onto K0, the shift applied to z.
ObstacleSolution deterministic_obstacle(const std::vector<Field>& v, const SpaceTimeGrid& grid);

}  // namespace rspde
