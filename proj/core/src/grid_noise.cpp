#include "rspde/grid_noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rspde/errors.hpp"

namespace rspde {

namespace {

constexpr double kStepSlack = 1e-3;

std::size_t checked_ratio(double t, double dt, const char* what) {
    const double ratio = t / dt;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > kStepSlack)
        throw InvalidArgument(std::string(what) + " is not a multiple of dt (ratio " +
                              std::to_string(ratio) + ")");
    return static_cast<std::size_t>(n);
}

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// 53 high-quality bits mapped to the open interval (0, 1).
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

SpaceTimeGrid make_grid(std::size_t n_space, double dt, double t_final) {
    if (n_space < 3) throw InvalidArgument("n_space must be >= 3, got " + std::to_string(n_space));
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive and finite");
    if (!(t_final >= dt) || !std::isfinite(t_final))
        throw InvalidArgument("t_final must be >= dt");
    SpaceTimeGrid g;
    g.n_space = n_space;
    g.dx = 1.0 / static_cast<double>(n_space + 1);
    g.dt = dt;
    g.n_steps = checked_ratio(t_final, dt, "t_final");
    return g;
}

std::size_t step_index(const SpaceTimeGrid& grid, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
    return checked_ratio(t, grid.dt, "time");
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += W0;
            key[1] += W1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, ctr[0], hi0, lo0);
        mulhilo(M1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

void standard_normals(const NoisePlan& plan, std::uint64_t step, std::span<double> out) {
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(plan.master_seed),
                                              static_cast<std::uint32_t>(plan.master_seed >> 32)};
    const auto stream_lo = static_cast<std::uint32_t>(plan.stream_id);
    const auto stream_hi = static_cast<std::uint32_t>(plan.stream_id >> 32);
    // Steps beyond 2^32 would alias; trajectories are far shorter.
    const auto step32 = static_cast<std::uint32_t>(step);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    const std::size_t n = out.size();
    for (std::size_t pair = 0; 2 * pair < n; ++pair) {
        const auto r = philox4x32({static_cast<std::uint32_t>(pair), step32, stream_lo, stream_hi}, key);
        const double u1 = open_unit(r[0], r[1]);
        const double u2 = open_unit(r[2], r[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = two_pi * u2;
        out[2 * pair] = radius * std::cos(angle);
        if (2 * pair + 1 < n) out[2 * pair + 1] = radius * std::sin(angle);
    }
}

void fill_increments(const NoisePlan& plan, const SpaceTimeGrid& grid, std::uint64_t step,
                     std::span<double> out) {
    standard_normals(plan, step, out);
    const double scale = std::sqrt(grid.dt * grid.dx);
    for (double& v : out) v *= scale;
}

Field sample_increments(const NoisePlan& plan, const SpaceTimeGrid& grid, std::size_t step) {
    if (step >= grid.n_steps)
        throw InvalidArgument("step " + std::to_string(step) + " outside grid horizon");
    Field dw(grid.n_space);
    fill_increments(plan, grid, step, dw.span());
    return dw;
}

}  // namespace rspde
