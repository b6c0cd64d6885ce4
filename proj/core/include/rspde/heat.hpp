#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rspde/field.hpp"
#include "rspde/grid_noise.hpp"

namespace rspde {

/// Dirichlet eigenbasis e_n(x) = sqrt(2) sin(n pi x) of A = (1/2) d^2/dx^2
/// sampled on the interior nodes, with continuum eigenvalues n^2 pi^2 / 2 of -A.
class SpectralBasis {
public:
    SpectralBasis(std::size_t n_space, std::size_t n_modes);

    std::size_t n_modes() const noexcept { return n_modes_; }
    std::size_t n_space() const noexcept { return n_space_; }
    double dx() const noexcept { return dx_; }

    /// Samples of e_n, n = 1..n_modes.
    std::span<const double> mode(std::size_t n) const;
    /// n^2 pi^2 / 2.
    static double eigenvalue(std::size_t n) noexcept;
    /// Eigenvalue of -(1/2) D2 on e_n: (1 - cos(n pi dx)) / dx^2.
    double discrete_eigenvalue(std::size_t n) const noexcept;

    /// <h, e_n> for n = 1..n_modes.
    std::vector<double> coefficients(std::span<const double> h) const;
    /// sum_n c_n e_n.
    Field synthesize(std::span<const double> coefficients) const;

private:
    std::size_t n_space_;
    std::size_t n_modes_;
    double dx_;
    std::vector<double> samples_;  // n_modes rows of n_space values
};

/// Samples of e_n on the interior nodes of a grid with n_space nodes.
Field eigenfunction(std::size_t n, std::size_t n_space);

/// T_t h = sum_n exp(-n^2 pi^2 t / 2) <h, e_n> e_n, truncated at n_modes
/// (n_modes = 0 means all n_space discrete modes). Throws DomainError if t < 0.
Field heat_apply(const Field& h, double t, std::size_t n_modes = 0);

/// Backward-Euler step of the linear part: solves (I - dt D2 / 2) v = w with
/// the 3-point Dirichlet Laplacian D2. The tridiagonal factorisation is
/// computed once; apply() is an O(n) forward/backward sweep.
class ImplicitHeatStep {
public:
    ImplicitHeatStep(std::size_t n_space, double dt, double dx);
    ImplicitHeatStep(const SpaceTimeGrid& grid) : ImplicitHeatStep(grid.n_space, grid.dt, grid.dx) {}

    /// v may alias w.
    void apply(std::span<const double> w, std::span<double> v) const;
    std::size_t size() const noexcept { return inv_pivot_.size(); }

private:
    double off_;                      // off-diagonal entry
    std::vector<double> inv_pivot_;   // 1 / modified diagonal
    std::vector<double> upper_;       // modified super-diagonal c'_i
};

/// Convenience wrapper over ImplicitHeatStep; dx is 1/(w.size()+1).
Field implicit_step(const Field& w, double dt);

/// Dirichlet heat kernel p(t,x,y) = sum_n exp(-n^2 pi^2 t/2) 2 sin(n pi x) sin(n pi y),
/// truncated once exp(-n^2 pi^2 t / 2) < 1e-14 or at n_modes (0 = no cap).
/// Throws DomainError if t <= 0.
double heat_kernel(double t, double x, double y, std::size_t n_modes = 0);

}  // namespace rspde
