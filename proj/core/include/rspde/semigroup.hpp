#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rspde/coefficients.hpp"
#include "rspde/field.hpp"
#include "rspde/grid_noise.hpp"
#include "rspde/solver.hpp"

namespace rspde {

enum class FunctionalKind {
    exp_neg_pair,      ///< offset + exp(-a <h, phi>^2); C^1
    clipped_affine,    ///< clamp(offset + <h, phi>, lo, hi); Lipschitz
    bounded_cylinder,  ///< lo + (hi - lo) 1{<h, phi> >= threshold}; discontinuous
};

std::string to_string(FunctionalKind kind);
FunctionalKind functional_kind_from_string(const std::string& name);

/// Bounded functional of the state, Phi(h) = g(<h, phi>) for a direction phi.
class Functional {
public:
    static Functional exp_neg_pair(Field direction, double a = 1.0, double offset = 0.0);
    static Functional clipped_affine(Field direction, double offset = 0.0, double lo = -1.0, double hi = 1.0);
    static Functional bounded_cylinder(Field direction, double threshold = 0.0, double lo = 0.0, double hi = 1.0);
    /// Phi == c, encoded as a clipped affine functional with zero direction.
    static Functional constant(std::size_t n_space, double c);

    double operator()(std::span<const double> h) const;
    /// Local Lipschitz constant |grad Phi|(h) in L2(0,1); +inf at a jump.
    double grad_norm(std::span<const double> h) const;

    FunctionalKind kind() const noexcept { return kind_; }
    const Field& direction() const noexcept { return direction_; }
    double dx() const noexcept { return dx_; }
    double lower_bound() const noexcept;
    double upper_bound() const noexcept;
    /// Declared lower bound is positive.
    bool strictly_positive() const noexcept { return lower_bound() > 0.0; }
    bool is_c1() const noexcept { return kind_ == FunctionalKind::exp_neg_pair; }
    std::string describe() const;

    double a() const noexcept { return a_; }
    double offset() const noexcept { return offset_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double threshold() const noexcept { return threshold_; }

private:
    Functional(FunctionalKind kind, Field direction);
    double pairing(std::span<const double> h) const { return inner(h, direction_, dx_); }

    FunctionalKind kind_;
    Field direction_;
    double dx_;
    double direction_norm_;
    double a_ = 1.0;
    double offset_ = 0.0;
    double lo_ = 0.0;
    double hi_ = 1.0;
    double threshold_ = 0.0;
};

/// Everything fixed across the paths of an ensemble. Path j uses the noise
/// plan (seed, stream j).
struct EstimatorSetup {
    Mode mode = Reflected{};
    CoefficientModel model;
    SpaceTimeGrid grid;
    std::size_t n_paths = 100;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  ///< 0 = worker_count()
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Mean and standard error (sample std / sqrt(n)) with pairwise summation.
MCEstimate summarize(std::span<const double> samples, std::uint64_t seed = 0);

/// u(t; h) for every path of the ensemble, indexed by stream. t must be a
/// multiple of dt; t = 0 returns copies of h. Output is independent of the
/// worker count.
std::vector<Field> simulate_ensemble(const Field& h, double t, const EstimatorSetup& setup);

/// Phi evaluated on every state.
std::vector<double> evaluate(const Functional& phi, const std::vector<Field>& states);

/// P_t Phi(h) = E[Phi(u(t; h))].
MCEstimate estimate_Pt(const Functional& phi, const Field& h, double t, const EstimatorSetup& setup);
/// P_t log Phi(h). Throws FunctionalContractError when Phi is not declared
/// strictly positive or a sample falls below the declared lower bound.
MCEstimate estimate_Pt_log(const Functional& phi, const Field& h, double t, const EstimatorSetup& setup);
/// P_t Phi^2 - (P_t Phi)^2 as the unbiased sample variance; std_error from the
/// fourth central moment.
MCEstimate estimate_variance(const Functional& phi, const Field& h, double t, const EstimatorSetup& setup);
MCEstimate variance_of(std::span<const double> samples, std::uint64_t seed = 0);

struct DirectionResult {
    double value = 0.0;      ///< |mean difference quotient|
    double std_error = 0.0;
    double projection_distance = 0.0;  ///< L2 distance moved by projecting h +- delta k onto K0
    bool rejected = false;
};

struct GradientEstimate {
    double value = 0.0;  ///< max over accepted directions
    double std_error = 0.0;  ///< of the maximising direction
    std::size_t best_direction = 0;
    std::vector<DirectionResult> directions;
    std::vector<std::string> notices;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Unit directions e_1..e_n_modes and, when include_parts, the normalised
/// positive and negative parts of each.
std::vector<Field> direction_dictionary(std::size_t n_space, std::size_t n_modes = 8, bool include_parts = false);

/// Default finite-difference step 1e-3 * max(|h|, 1).
double default_delta(const Field& h, double dx);

/// Central finite-difference lower-bound proxy for |grad P_t Phi|(h): the
/// maximum over the directions of |P_t Phi(h + delta k) - P_t Phi(h - delta k)|
/// / |h_+ - h_-|. Perturbed points are projected onto K0; a direction whose
/// projection moves a point by more than delta/10 is rejected with a notice.
/// With coupled = true both sides share noise (common random numbers).
GradientEstimate estimate_grad_Pt(const Functional& phi, const Field& h, double t, const std::vector<Field>& directions,
                                  double delta, const EstimatorSetup& setup, bool coupled = true);

/// JSON record {functional, h_id, t, mean, std_error, n_paths, seed}.
std::string estimate_record_json(const MCEstimate& est, const std::string& functional, const std::string& h_id,
                                 double t);

}  // namespace rspde
