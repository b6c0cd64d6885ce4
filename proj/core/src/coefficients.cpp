#include "rspde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rspde/errors.hpp"
#include "rspde/quadrature.hpp"

namespace rspde {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;  // sqrt(pi)
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double param(const std::map<std::string, double>& params, const std::map<std::string, double>& defaults,
             const std::string& key) {
    if (auto it = params.find(key); it != params.end()) return it->second;
    return defaults.at(key);
}

const std::map<std::string, std::map<std::string, double>>& catalogue() {
    static const std::map<std::string, std::map<std::string, double>> entries = {
        {"constant", {{"b0", 0.0}, {"s0", 1.0}}},
        {"affine_clamped", {{"b0", 0.0}, {"b1", 1.0}, {"s0", 1.5}, {"s1", 0.4}, {"c", 1.0}}},
        {"sin_modulated",
         {{"b0", 0.0}, {"b_amp", 1.0}, {"b_freq", 1.0}, {"s_mean", 1.5}, {"s_amp", 0.4}, {"s_freq", 1.0}}},
    };
    return entries;
}

}  // namespace

double penalty_value(PenaltyKind kind, double u) noexcept {
    if (u >= 0.0) return 0.0;
    switch (kind) {
        case PenaltyKind::negative_part: return -u;
        case PenaltyKind::arctan_square: return std::atan(u * u);
    }
    return 0.0;
}

double penalty_derivative(PenaltyKind kind, double u) noexcept {
    if (u >= 0.0) return 0.0;
    switch (kind) {
        case PenaltyKind::negative_part: return -1.0;
        case PenaltyKind::arctan_square: {
            const double u2 = u * u;
            return 2.0 * u / (1.0 + u2 * u2);
        }
    }
    return 0.0;
}

std::vector<std::string> catalogue_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : catalogue()) names.push_back(name);
    return names;
}

std::map<std::string, double> catalogue_defaults(const std::string& name) {
    const auto it = catalogue().find(name);
    if (it == catalogue().end()) throw InvalidArgument("unknown model '" + name + "'");
    return it->second;
}

CoefficientModel make_catalogue_model(const std::string& name, const std::map<std::string, double>& params,
                                      PenaltyKind penalty) {
    const auto defaults = catalogue_defaults(name);
    for (const auto& [key, _] : params)
        if (!defaults.contains(key))
            throw InvalidArgument("model '" + name + "' has no parameter '" + key + "'");

    CoefficientModel m;
    m.name = name;
    m.penalty = penalty;
    m.params = defaults;
    for (const auto& [key, value] : params) m.params[key] = value;

    if (name == "constant") {
        const double b0 = param(params, defaults, "b0");
        const double s0 = param(params, defaults, "s0");
        m.b = [b0](double) { return b0; };
        m.sigma = [s0](double) { return s0; };
        m.db = [](double) { return 0.0; };
        m.dsigma = [](double) { return 0.0; };
        m.L_b = 0.0;
        m.L_sigma = 0.0;
        m.kappa1 = std::abs(s0);
        m.kappa2 = std::abs(s0);
    } else if (name == "affine_clamped") {
        const double b0 = param(params, defaults, "b0"), b1 = param(params, defaults, "b1");
        const double s0 = param(params, defaults, "s0"), s1 = param(params, defaults, "s1");
        const double c = param(params, defaults, "c");
        if (!(c > 0.0)) throw InvalidArgument("affine_clamped: c must be positive");
        m.b = [b0, b1, c](double u) { return b0 + b1 * std::clamp(u, -c, c); };
        m.sigma = [s0, s1, c](double u) { return s0 + s1 * std::clamp(u, -c, c); };
        m.L_b = std::abs(b1);
        m.L_sigma = std::abs(s1);
        // |sigma| ranges over [|s0| - |s1| c, |s0| + |s1| c] when that interval avoids 0.
        m.kappa1 = std::max(0.0, std::abs(s0) - std::abs(s1) * c);
        m.kappa2 = std::abs(s0) + std::abs(s1) * c;
    } else {
        const double b0 = param(params, defaults, "b0");
        const double ba = param(params, defaults, "b_amp"), bf = param(params, defaults, "b_freq");
        const double sm = param(params, defaults, "s_mean");
        const double sa = param(params, defaults, "s_amp"), sf = param(params, defaults, "s_freq");
        m.b = [b0, ba, bf](double u) { return b0 + ba * std::sin(bf * u); };
        m.sigma = [sm, sa, sf](double u) { return sm + sa * std::sin(sf * u); };
        m.db = [ba, bf](double u) { return ba * bf * std::cos(bf * u); };
        m.dsigma = [sa, sf](double u) { return sa * sf * std::cos(sf * u); };
        m.L_b = std::abs(ba * bf);
        m.L_sigma = std::abs(sa * sf);
        m.kappa1 = std::max(0.0, std::abs(sm) - std::abs(sa));
        m.kappa2 = std::abs(sm) + std::abs(sa);
    }
    return m;
}

CoefficientModel standard_model() {
    auto m = make_catalogue_model("sin_modulated");
    m.L_b = 1.0;
    m.L_sigma = 1.0;
    m.kappa1 = 1.1;
    m.kappa2 = 1.9;
    return m;
}

CoefficientModel heat_only_model() {
    return make_catalogue_model("constant", {{"b0", 0.0}, {"s0", 0.0}});
}

ValidationReport validate_model(const CoefficientModel& model, double lo, double hi) {
    if (!(hi > lo)) throw InvalidArgument("validation range must be nonempty");
    constexpr int kPairs = 10000;
    constexpr double kRel = 1e-9;

    ValidationReport r;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(lo, hi);

    r.min_abs_sigma = std::numeric_limits<double>::infinity();
    r.max_abs_sigma = 0.0;
    auto track_sigma = [&](double u) {
        const double s = std::abs(model.sigma(u));
        r.min_abs_sigma = std::min(r.min_abs_sigma, s);
        r.max_abs_sigma = std::max(r.max_abs_sigma, s);
    };
    bool penalty_ok = true;
    for (int i = 0; i < kPairs; ++i) {
        const double u = dist(rng);
        double v = dist(rng);
        if (u == v) v = std::nextafter(u, hi);
        const double du = std::abs(u - v);
        r.worst_b_ratio = std::max(r.worst_b_ratio, std::abs(model.b(u) - model.b(v)) / du);
        r.worst_sigma_ratio = std::max(r.worst_sigma_ratio, std::abs(model.sigma(u) - model.sigma(v)) / du);
        track_sigma(u);
        track_sigma(v);
        // Grid points (including 0 when inside the range) catch point violations.
        track_sigma(lo + (hi - lo) * i / (kPairs - 1));

        const double fu = penalty_value(model.penalty, u), fv = penalty_value(model.penalty, v);
        if ((u < v && fu < fv) || (v < u && fv < fu)) penalty_ok = false;
        if ((u >= 0.0 && fu != 0.0) || (u < 0.0 && !(fu > 0.0))) penalty_ok = false;
    }
    if (lo <= 0.0 && hi >= 0.0) track_sigma(0.0);

    r.lipschitz_b = r.worst_b_ratio <= model.L_b * (1.0 + kRel);
    r.lipschitz_sigma = r.worst_sigma_ratio <= model.L_sigma * (1.0 + kRel);
    r.sigma_bounds = r.min_abs_sigma >= model.kappa1 * (1.0 - kRel) && r.max_abs_sigma <= model.kappa2 * (1.0 + kRel);
    r.kappa_order = model.kappa1 > 0.0 && model.kappa1 < model.kappa2;
    r.penalty_shape = penalty_ok;

    if (!r.lipschitz_b) r.failures.push_back("b exceeds declared L_b");
    if (!r.lipschitz_sigma) r.failures.push_back("sigma exceeds declared L_sigma");
    if (!r.sigma_bounds) r.failures.push_back("|sigma| leaves [kappa1, kappa2]");
    if (!r.kappa_order) r.failures.push_back("need 0 < kappa1 < kappa2");
    if (!r.penalty_shape) r.failures.push_back("penalty is not a nonincreasing negative-part shape");
    r.pass = r.failures.empty();
    return r;
}

double constant_M(double L_b, double L_sigma) {
    if (!(L_sigma > 0.0)) throw DegenerateDiffusion("constant M requires L_sigma > 0");
    const double lb2 = L_b * L_b, ls2 = L_sigma * L_sigma;
    return std::max({3.0, 9.0 * ls2 / kSqrtPi, 8.0 * lb2 / (ls2 * ls2), 144.0 * lb2 / (ls2 * kSqrtPi),
                     864.0 * lb2 / kSqrtPi});
}

double zeta(double t, double L_b, double L_sigma) {
    if (!(t >= 0.0)) throw DomainError("zeta: t must be nonnegative");
    const double lb2 = L_b * L_b, ls2 = L_sigma * L_sigma;
    const double rt = std::sqrt(t);
    return rt + 2.25 * ls2 * ls2 * t + 1.5 * lb2 * t * t + 18.0 * lb2 * ls2 / (5.0 * kSqrtPi) * t * t * rt;
}

BoundProfile::BoundProfile(double L_b, double L_sigma)
    : L_b_(L_b), L_sigma_(L_sigma), M_(constant_M(L_b, L_sigma)) {}

double BoundProfile::zeta(double t) const { return rspde::zeta(t, L_b_, L_sigma_); }

// Both integrals are taken in r = sqrt(s), which removes the sqrt singularity
// of zeta at the origin: int_0^t g(s) ds = int_0^sqrt(t) 2 r g(r^2) dr.
double BoundProfile::integral_exp_neg_zeta(double t) const {
    if (!(t >= 0.0)) throw DomainError("integral: t must be nonnegative");
    return adaptive_simpson([this](double r) { return 2.0 * r * std::exp(-zeta(r * r)); }, 0.0, std::sqrt(t),
                            1e-10);
}

double BoundProfile::integral_exp_zeta(double t) const {
    if (!(t >= 0.0)) throw DomainError("integral: t must be nonnegative");
    return adaptive_simpson([this](double r) { return 2.0 * r * std::exp(zeta(r * r)); }, 0.0, std::sqrt(t), 1e-10);
}

double harnack_rhs(double t, double dist2, const BoundProfile& profile, double kappa1) {
    if (!(t > 0.0)) throw DomainError("harnack_rhs: t must be positive");
    if (!(dist2 >= 0.0)) throw DomainError("harnack_rhs: dist2 must be nonnegative");
    if (!(kappa1 > 0.0)) throw DomainError("harnack_rhs: kappa1 must be positive");
    return profile.M() * dist2 / (kappa1 * kappa1 * profile.integral_exp_neg_zeta(t));
}

double t0_condition(double t, double eps, double L_b, double L_sigma) {
    const double a = L_b + 1.0 / eps;
    const double drift = a * a * t / kPi2 * (-std::expm1(-kPi2 * t));

    // Terms with n^2 pi^2 t beyond 40 equal 1/n^2 to double precision; the
    // remaining tail sum_{n>N} 1/n^2 uses its Euler-Maclaurin expansion.
    const auto n_cut = static_cast<long>(std::max(16.0, std::ceil(std::sqrt(40.0 / (kPi2 * t)))));
    double series = 0.0;
    for (long n = n_cut; n >= 1; --n) {
        const double nn = static_cast<double>(n) * static_cast<double>(n);
        series += -std::expm1(-nn * kPi2 * t) / nn;
    }
    const double N = static_cast<double>(n_cut);
    const double N2 = N * N;
    const double tail = 1.0 / N - 1.0 / (2.0 * N2) + 1.0 / (6.0 * N2 * N) - 1.0 / (30.0 * N2 * N2 * N) +
                        1.0 / (42.0 * N2 * N2 * N2 * N);
    series += tail;
    return drift + 2.0 * L_sigma * L_sigma / kPi2 * series;
}

double t0_eps(double eps, double L_b, double L_sigma) {
    if (!(eps > 0.0)) throw DomainError("t0_eps: eps must be positive");
    constexpr double kBound = 1.0 / 6.0;
    double lo = 1e-12;
    if (t0_condition(lo, eps, L_b, L_sigma) > kBound) return 0.0;
    double hi = 1.0;
    while (t0_condition(hi, eps, L_b, L_sigma) <= kBound) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::min(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (t0_condition(mid, eps, L_b, L_sigma) <= kBound ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace rspde
