#include "rspde/heat.hpp"

#include <cmath>
#include <numbers>

#include "rspde/errors.hpp"

namespace rspde {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
}  // namespace

SpectralBasis::SpectralBasis(std::size_t n_space, std::size_t n_modes)
    : n_space_(n_space), n_modes_(n_modes), dx_(1.0 / static_cast<double>(n_space + 1)) {
    if (n_modes == 0 || n_modes > n_space)
        throw InvalidArgument("SpectralBasis: need 1 <= n_modes <= n_space");
    samples_.resize(n_modes * n_space);
    for (std::size_t n = 1; n <= n_modes; ++n)
        for (std::size_t i = 0; i < n_space; ++i)
            samples_[(n - 1) * n_space + i] =
                kSqrt2 * std::sin(static_cast<double>(n) * kPi * static_cast<double>(i + 1) * dx_);
}

std::span<const double> SpectralBasis::mode(std::size_t n) const {
    return std::span<const double>(samples_).subspan((n - 1) * n_space_, n_space_);
}

double SpectralBasis::eigenvalue(std::size_t n) noexcept {
    const double k = static_cast<double>(n) * kPi;
    return 0.5 * k * k;
}

double SpectralBasis::discrete_eigenvalue(std::size_t n) const noexcept {
    return (1.0 - std::cos(static_cast<double>(n) * kPi * dx_)) / (dx_ * dx_);
}

std::vector<double> SpectralBasis::coefficients(std::span<const double> h) const {
    std::vector<double> c(n_modes_);
    for (std::size_t n = 1; n <= n_modes_; ++n) c[n - 1] = inner(h, mode(n), dx_);
    return c;
}

Field SpectralBasis::synthesize(std::span<const double> coefficients) const {
    Field out(n_space_);
    for (std::size_t n = 1; n <= coefficients.size() && n <= n_modes_; ++n) {
        const auto e = mode(n);
        const double c = coefficients[n - 1];
        for (std::size_t i = 0; i < n_space_; ++i) out[i] += c * e[i];
    }
    return out;
}

Field eigenfunction(std::size_t n, std::size_t n_space) {
    const double dx = 1.0 / static_cast<double>(n_space + 1);
    Field e(n_space);
    for (std::size_t i = 0; i < n_space; ++i)
        e[i] = kSqrt2 * std::sin(static_cast<double>(n) * kPi * static_cast<double>(i + 1) * dx);
    return e;
}

Field heat_apply(const Field& h, double t, std::size_t n_modes) {
    if (!(t >= 0.0)) throw DomainError("heat_apply: t must be nonnegative");
    if (t == 0.0) return h;
    const std::size_t modes = n_modes == 0 ? h.size() : std::min(n_modes, h.size());
    const SpectralBasis basis(h.size(), modes);
    auto c = basis.coefficients(h);
    for (std::size_t n = 1; n <= modes; ++n) c[n - 1] *= std::exp(-SpectralBasis::eigenvalue(n) * t);
    return basis.synthesize(c);
}

ImplicitHeatStep::ImplicitHeatStep(std::size_t n_space, double dt, double dx)
    : inv_pivot_(n_space), upper_(n_space) {
    // Row i: -r v_{i-1} + (1 + 2r) v_i - r v_{i+1} = w_i, r = dt / (2 dx^2).
    const double r = dt / (2.0 * dx * dx);
    const double diag = 1.0 + 2.0 * r;
    off_ = -r;
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < n_space; ++i) {
        const double pivot = diag - (i == 0 ? 0.0 : off_ * prev_upper);
        inv_pivot_[i] = 1.0 / pivot;
        upper_[i] = off_ * inv_pivot_[i];
        prev_upper = upper_[i];
    }
}

void ImplicitHeatStep::apply(std::span<const double> w, std::span<double> v) const {
    const std::size_t n = inv_pivot_.size();
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        prev = (w[i] - off_ * prev) * inv_pivot_[i];
        v[i] = prev;
    }
    for (std::size_t i = n - 1; i-- > 0;) v[i] -= upper_[i] * v[i + 1];
}

Field implicit_step(const Field& w, double dt) {
    const ImplicitHeatStep solver(w.size(), dt, 1.0 / static_cast<double>(w.size() + 1));
    Field v(w.size());
    solver.apply(w, v.span());
    return v;
}

double heat_kernel(double t, double x, double y, std::size_t n_modes) {
    if (!(t > 0.0)) throw DomainError("heat_kernel: t must be positive");
    double sum = 0.0;
    for (std::size_t n = 1; n_modes == 0 || n <= n_modes; ++n) {
        const double decay = std::exp(-SpectralBasis::eigenvalue(n) * t);
        if (decay < 1e-14) break;
        const double k = static_cast<double>(n) * kPi;
        sum += decay * 2.0 * std::sin(k * x) * std::sin(k * y);
    }
    return sum;
}

}  // namespace rspde
