#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rspde/coefficients.hpp"
#include "rspde/errors.hpp"
#include "rspde/field.hpp"
#include "rspde/grid_noise.hpp"
#include "rspde/semigroup.hpp"
#include "rspde/solver.hpp"

namespace rspde::cli {

/// Config problem located at a line (1-based, 0 when unknown) and a dotted field path.
class ConfigError : public InvalidArgument {
public:
    ConfigError(int line, std::string field, const std::string& message)
        : InvalidArgument(format(line, field, message)), line_(line), field_(std::move(field)) {}
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(int line, const std::string& field, const std::string& message) {
        std::string out = "config";
        if (line > 0) out += " line " + std::to_string(line);
        if (!field.empty()) out += ", field '" + field + "'";
        return out + ": " + message;
    }
    int line_;
    std::string field_;
};

struct GridSpec {
    std::size_t n_space = 63;
    double dt = 1e-3;
    double t_final = 0.25;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct ModelSpec {
    std::string name = "sin_modulated";
    std::map<std::string, double> params;
    std::string penalty = "negative_part";
    // Declared constants; empty = the tight catalogue values.
    std::optional<double> L_b;
    std::optional<double> L_sigma;
    std::optional<double> kappa1;
    std::optional<double> kappa2;
    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct RunSpec {
    std::string mode = "reflected";  ///< reflected | penalized
    double eps = 1e-2;
    std::vector<double> eps_ladder{1e-2, 1e-3, 1e-4};
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    std::vector<double> save_at;  ///< empty = every step
    std::string format = "both";  ///< csv | binary | both
    friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// Phi(h) = g(<h, phi>) with phi given by sine coefficients.
struct FunctionalSpec {
    std::string kind = "exp_neg_pair";
    std::vector<double> direction{1.0};
    double a = 1.0;
    double offset = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    double threshold = 0.0;
    friend bool operator==(const FunctionalSpec&, const FunctionalSpec&) = default;
};

struct CheckSpec {
    std::string kind = "gradient";  ///< gradient | log-harnack | variance | lipschitz | continuity | comparison
    std::vector<double> times;  ///< empty = grid.t_final
    FunctionalSpec functional;
    std::vector<double> h{0.2};   ///< sine coefficients, clipped to K0
    std::vector<double> h1{0.2};
    std::vector<double> h2{};
    double p = 2.0;
    double n_sigma = 3.0;
    double delta = 0.0;            ///< 0 = default step
    std::size_t n_directions = 8;
    double eps_coarse = 1e-2;
    double eps_fine = 1e-3;
    friend bool operator==(const CheckSpec&, const CheckSpec&) = default;
};

struct ExperimentConfig {
    GridSpec grid;
    ModelSpec model;
    RunSpec run;
    CheckSpec check;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses YAML text. Unknown keys, wrong types and invalid values raise
/// ConfigError with the line and field path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical serialisation: every field, fixed key order, shortest round-trip doubles.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical serialisation, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

SpaceTimeGrid build_grid(const GridSpec& spec);
CoefficientModel build_model(const ModelSpec& spec);
Mode build_mode(const RunSpec& spec);
PenaltyKind penalty_from_string(const std::string& name);

/// sum_n c_n sin(n pi x) on the interior nodes.
Field sine_series(const std::vector<double>& coefficients, std::size_t n_space);

struct InitialField {
    Field field;
    double clip_distance = 0.0;  ///< L2 distance removed by clipping onto K0
};
/// Sine series with negative parts clipped.
InitialField initial_field(const std::vector<double>& coefficients, std::size_t n_space);

Functional build_functional(const FunctionalSpec& spec, std::size_t n_space);

}  // namespace rspde::cli
