#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rspde/errors.hpp"
#include "rspde/heat.hpp"

namespace rspde {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(SpectralBasis, DiscreteOrthonormality) {
    const SpectralBasis basis(127, 12);
    const double dx = basis.dx();
    for (std::size_t n = 1; n <= 12; ++n)
        for (std::size_t m = 1; m <= 12; ++m) {
            double s = 0.0;
            for (std::size_t i = 0; i < 127; ++i) s += basis.mode(n)[i] * basis.mode(m)[i];
            EXPECT_NEAR(s * dx, n == m ? 1.0 : 0.0, 1e-12);
        }
}

TEST(SpectralBasis, CoefficientsRoundTrip) {
    const SpectralBasis basis(63, 63);
    std::vector<double> c(63, 0.0);
    c[0] = 0.8;
    c[2] = -0.1;
    c[6] = 0.05;
    const Field f = basis.synthesize(c);
    const auto back = basis.coefficients(f.span());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(back[i], c[i], 1e-12);
}

TEST(SpectralBasis, Eigenvalues) {
    EXPECT_NEAR(SpectralBasis::eigenvalue(1), kPi * kPi / 2, 1e-14);
    EXPECT_NEAR(SpectralBasis::eigenvalue(3), 9 * kPi * kPi / 2, 1e-12);
    const SpectralBasis basis(255, 3);
    // (1 - cos(pi dx)) / dx^2 -> pi^2 / 2 with O(dx^2) error.
    EXPECT_NEAR(basis.discrete_eigenvalue(1), kPi * kPi / 2, 1e-4);
}

TEST(HeatApply, FirstModeDecay) {
    const Field e1 = eigenfunction(1, 127);
    const Field out = heat_apply(e1, 0.1);
    const double factor = std::exp(-kPi * kPi * 0.1 / 2);
    EXPECT_NEAR(factor, 0.61049, 1e-5);
    for (std::size_t i = 0; i < e1.size(); ++i) EXPECT_NEAR(out[i], factor * e1[i], 1e-12);
    EXPECT_THROW(heat_apply(e1, -0.1), DomainError);
    EXPECT_EQ(heat_apply(e1, 0.0), e1);
}

TEST(HeatApply, SemigroupProperty) {
    Field h(63);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = double(i + 1) / 64.0;
        h[i] = x * (1 - x) + 0.3 * std::max(0.0, 0.2 - std::abs(x - 0.7));
    }
    const Field direct = heat_apply(h, 0.07);
    const Field composed = heat_apply(heat_apply(h, 0.03), 0.04);
    EXPECT_LT(sup_distance(direct, composed), 1e-12);
}

TEST(ImplicitHeatStep, FirstModeRatio) {
    const std::size_t n = 127;
    const double dt = 1e-3, dx = 1.0 / 128.0;
    const ImplicitHeatStep step(n, dt, dx);
    const Field e1 = eigenfunction(1, n);
    Field out(n);
    step.apply(e1.span(), out.span());
    // Independent ratio: 1 / (1 + dt * (2 - 2 cos(pi dx)) / (2 dx^2)).
    const double ratio = 1.0 / (1.0 + dt * (1.0 - std::cos(kPi * dx)) / (dx * dx));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(out[i], ratio * e1[i], 1e-10);
}

TEST(ImplicitHeatStep, SolvesTridiagonalSystem) {
    const std::size_t n = 31;
    const double dt = 0.02, dx = 1.0 / 32.0;
    const ImplicitHeatStep step(n, dt, dx);
    Field w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::sin(3.0 * double(i)) + 0.5;
    Field v(n);
    step.apply(w.span(), v.span());
    const double r = dt / (2 * dx * dx);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? v[i - 1] : 0.0;
        const double right = i + 1 < n ? v[i + 1] : 0.0;
        EXPECT_NEAR((1 + 2 * r) * v[i] - r * (left + right), w[i], 1e-12);
    }
    // In-place application.
    Field alias = w;
    step.apply(alias.span(), alias.span());
    EXPECT_EQ(alias, v);
}

TEST(ImplicitHeatStep, ConvergesToHeatFlow) {
    Field h(127);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = double(i + 1) / 128.0;
        h[i] = std::sin(kPi * x) + 0.5 * std::sin(3 * kPi * x);
    }
    const ImplicitHeatStep step(127, 1e-4, 1.0 / 128.0);
    Field u = h;
    for (int k = 0; k < 1000; ++k) step.apply(u.span(), u.span());
    EXPECT_LT(sup_distance(u, heat_apply(h, 0.1)), 1e-3);
}

TEST(ImplicitHeatStep, ContractionAndPositivity) {
    const ImplicitHeatStep step(63, 1e-2, 1.0 / 64.0);
    Field w(63);
    for (std::size_t i = 0; i < 63; ++i) w[i] = (i % 7 == 0) ? 1.0 : 0.0;
    Field v(63);
    step.apply(w.span(), v.span());
    EXPECT_LE(sup_norm(v), sup_norm(w));
    EXPECT_LE(l2_norm(v, 1.0 / 64), l2_norm(w, 1.0 / 64));
    EXPECT_TRUE(is_nonnegative(v));
}

TEST(HeatKernel, SymmetricPositiveSubMarkov) {
    for (double t : {0.01, 0.1, 0.5}) {
        EXPECT_NEAR(heat_kernel(t, 0.3, 0.6), heat_kernel(t, 0.6, 0.3), 1e-14);
        double mass = 0.0;
        const int n = 2000;
        for (int i = 1; i < n; ++i) {
            const double p = heat_kernel(t, 0.4, double(i) / n);
            EXPECT_GE(p, -1e-12);
            mass += p / n;
        }
        EXPECT_LE(mass, 1.0 + 1e-9);
    }
    EXPECT_THROW(heat_kernel(0.0, 0.5, 0.5), DomainError);
}

TEST(HeatKernel, DominatedByGaussian) {
    // Gaussian kernel of variance t for the generator (1/2) d^2/dx^2.
    for (double t : {0.005, 0.02, 0.1})
        for (double x : {0.2, 0.5})
            for (double y : {0.1, 0.3, 0.5, 0.9}) {
                const double q = std::exp(-(x - y) * (x - y) / (2 * t)) / std::sqrt(2 * kPi * t);
                EXPECT_LE(heat_kernel(t, x, y), q + 1e-12);
            }
}

TEST(HeatKernel, MatchesSpectralAction) {
    // Riemann sum of the kernel against e_1 reproduces the decay factor.
    const double t = 0.05;
    const int n = 4000;
    double s = 0.0;
    for (int i = 1; i < n; ++i) {
        const double y = double(i) / n;
        s += heat_kernel(t, 0.5, y) * std::sqrt(2.0) * std::sin(kPi * y) / n;
    }
    EXPECT_NEAR(s, std::exp(-kPi * kPi * t / 2) * std::sqrt(2.0), 1e-6);
}

}  // namespace
}  // namespace rspde
