#pragma once

#include <cmath>
#include <functional>

namespace rspde {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to the given relative
/// tolerance (relative to a coarse estimate of the integral; falls back to
/// an absolute tolerance of rel_tol when that estimate is zero).
template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol = 1e-8, int max_depth = 50) {
    if (a == b) return 0.0;
    // Seed with a 16-panel composite rule to get a scale for the tolerance and
    // avoid false convergence on the first panel.
    constexpr int panels = 16;
    const double h = (b - a) / panels;
    double total = 0.0;
    double scale = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + h * i, pb = (i + 1 == panels) ? b : a + h * (i + 1);
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa), fb = f(pb), fm = f(pm);
        scale += std::abs((pb - pa) / 6.0 * (fa + 4.0 * fm + fb));
    }
    const double tol = rel_tol * (scale > 0.0 ? scale : 1.0) / panels;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + h * i, pb = (i + 1 == panels) ? b : a + h * (i + 1);
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa), fb = f(pb), fm = f(pm);
        const double s = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        total += detail::simpson_step(f, pa, fa, pb, fb, pm, fm, s, tol, max_depth);
    }
    return total;
}

}  // namespace rspde
