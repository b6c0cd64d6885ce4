#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "rspde/field.hpp"

namespace rspde {

/// Uniform mesh of [0,1] (interior nodes only) together with a uniform time mesh.
struct SpaceTimeGrid {
    std::size_t n_space = 0;  ///< interior nodes; boundary values are implicitly 0
    double dx = 0.0;          ///< 1 / (n_space + 1)
    double dt = 0.0;
    std::size_t n_steps = 0;

    double t_final() const noexcept { return dt * static_cast<double>(n_steps); }
    /// Coordinate of interior node i (0-based), i.e. (i + 1) dx.
    double x(std::size_t i) const noexcept { return static_cast<double>(i + 1) * dx; }
    double time(std::size_t step) const noexcept { return dt * static_cast<double>(step); }

    friend bool operator==(const SpaceTimeGrid&, const SpaceTimeGrid&) = default;
};

/// Builds a grid. Throws InvalidArgument if n_space < 3, dt <= 0, t_final < dt
/// or t_final / dt is further than 0.1% of a step from an integer.
SpaceTimeGrid make_grid(std::size_t n_space, double dt, double t_final);

/// Converts a time to a step index; throws InvalidArgument if t is negative or
/// not a multiple of dt within 0.1% of a step.
std::size_t step_index(const SpaceTimeGrid& grid, double t);

/// Identifies one reproducible realisation of the space-time white noise.
/// The increment block for (master_seed, stream_id, step) is a pure function
/// of those three values.
struct NoisePlan {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const NoisePlan&, const NoisePlan&) = default;
};

/// A plan yielding exactly the same increments, used to drive two solutions
/// with one realisation of W (common random numbers).
constexpr NoisePlan couple(const NoisePlan& plan) noexcept { return plan; }

/// Philox4x32-10 block cipher on a 128-bit counter with a 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Fills out[i] with i.i.d. N(0,1) variates for node i at the given step.
/// The counter-to-Gaussian mapping is documented in docs/noise.md.
void standard_normals(const NoisePlan& plan, std::uint64_t step, std::span<double> out);

/// Space-time white-noise increments over one step: n_space independent
/// N(0, dt*dx) values. Throws InvalidArgument if step >= grid.n_steps.
Field sample_increments(const NoisePlan& plan, const SpaceTimeGrid& grid, std::size_t step);

/// Same as sample_increments but writes into caller storage and does not
/// check the step against the grid horizon.
void fill_increments(const NoisePlan& plan, const SpaceTimeGrid& grid, std::uint64_t step,
                     std::span<double> out);

/// SplitMix64 finaliser; used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace rspde
