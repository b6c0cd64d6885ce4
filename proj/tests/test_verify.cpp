#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"

#include "rspde/errors.hpp"
#include "rspde/heat.hpp"
#include "rspde/verify.hpp"

namespace rspde {
namespace {

constexpr double kPi = std::numbers::pi;

Field bump(std::size_t n, double scale) {
    Field h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = scale * std::sin(kPi * double(i + 1) / double(n + 1));
    return h;
}

CheckConfig small_config(std::size_t n_paths = 200) {
    CheckConfig cfg;
    cfg.setup.mode = Reflected{};
    cfg.setup.model = standard_model();
    cfg.setup.grid = make_grid(31, 1e-3, 0.1);
    cfg.setup.n_paths = n_paths;
    cfg.setup.seed = 21;
    cfg.directions = direction_dictionary(31, 3);
    return cfg;
}

TEST(GradientCheck, PassesAndFailInjectionFlips) {
    auto cfg = small_config();
    const auto phi = Functional::exp_neg_pair(eigenfunction(1, 31), 4.0, 0.0);
    const Field h = bump(31, 0.3);
    const auto ok = check_gradient_estimate(phi, h, 0.05, cfg);
    EXPECT_TRUE(ok.pass) << to_json(ok);
    EXPECT_GT(ok.lhs, 0.0);
    EXPECT_GT(ok.margin_ratio, 1.0);

    cfg.m_scale = 1e-6;
    const auto bad = check_gradient_estimate(phi, h, 0.05, cfg);
    EXPECT_FALSE(bad.pass) << to_json(bad);
    EXPECT_NEAR(bad.rhs / ok.rhs, 1e-6, 1e-12);
}

TEST(GradientCheck, RejectsNonSmoothFunctionalAndDegenerateModel) {
    auto cfg = small_config(10);
    const auto cyl = Functional::bounded_cylinder(eigenfunction(1, 31));
    EXPECT_THROW(check_gradient_estimate(cyl, bump(31, 0.3), 0.05, cfg), InvalidArgument);
    cfg.setup.model = make_catalogue_model("constant", {{"s0", 1.0}});
    const auto phi = Functional::exp_neg_pair(eigenfunction(1, 31));
    EXPECT_THROW(check_gradient_estimate(phi, bump(31, 0.3), 0.05, cfg), InvalidArgument);
}

TEST(LogHarnack, IdenticalPointsPassWithZeroAdditiveTerm) {
    const auto cfg = small_config();
    const auto phi = Functional::exp_neg_pair(eigenfunction(1, 31), 2.0, 0.5);
    const Field h = bump(31, 0.2);
    const auto r = check_log_harnack(phi, h, h, 0.05, cfg);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.detail("harnack_term"), 0.0);
    EXPECT_LE(r.lhs, r.rhs);  // sample Jensen holds exactly
}

TEST(LogHarnack, DistinctPointsPassAndContractEnforced) {
    const auto cfg = small_config();
    const auto phi = Functional::exp_neg_pair(eigenfunction(1, 31), 2.0, 0.5);
    const auto r = check_log_harnack(phi, bump(31, 0.2), Field(31, 0.0), 0.05, cfg);
    EXPECT_TRUE(r.pass) << to_json(r);
    const BoundProfile profile(1.0, 1.0);
    const double dist2 = std::pow(l2_norm(bump(31, 0.2), 1.0 / 32.0), 2);
    EXPECT_NEAR(r.detail("harnack_term"), harnack_rhs(0.05, dist2, profile, 1.1), 1e-9);

    const auto clip = Functional::clipped_affine(eigenfunction(1, 31));
    EXPECT_THROW(check_log_harnack(clip, bump(31, 0.2), Field(31, 0.0), 0.05, cfg), FunctionalContractError);
    EXPECT_THROW(check_log_harnack(phi, bump(31, 0.2), Field(31, 0.0), 0.0, cfg), DomainError);
}

TEST(VarianceAndLipschitz, PassOnSmallRun) {
    const auto cfg = small_config();
    const auto phi = Functional::exp_neg_pair(eigenfunction(1, 31), 4.0, 0.0);
    const Field h = bump(31, 0.3);
    const auto var = check_variance_bound(phi, h, 0.05, cfg);
    EXPECT_TRUE(var.pass) << to_json(var);
    const auto lip = check_lipschitz_Pt(phi, h, 0.05, cfg);
    EXPECT_TRUE(lip.pass) << to_json(lip);
}

TEST(VarianceAndLipschitz, DiscontinuousFunctionalHasFiniteProxy) {
    const auto cfg = small_config();
    const Field h = bump(31, 0.3);
    const Field e1 = eigenfunction(1, 31);
    const auto cyl = Functional::bounded_cylinder(e1, inner(h, e1, 1.0 / 32.0));
    const auto lip = check_lipschitz_Pt(cyl, h, 0.05, cfg);
    EXPECT_TRUE(std::isfinite(lip.lhs));
    EXPECT_TRUE(std::isfinite(lip.detail("grad_proxy")));
}

TEST(Continuity, IdenticalDataIsTrivialPass) {
    const auto cfg = small_config(10);
    const Field h = bump(31, 0.2);
    const auto r = check_initial_continuity(h, h, 0.05, 2.0, cfg);
    EXPECT_TRUE(r.pass);
    EXPECT_FALSE(r.notices.empty());
}

TEST(Continuity, RatioStableOnLadder) {
    const auto cfg = small_config(20);
    const Field h1 = bump(31, 0.3);
    const Field h2 = h1 + Field(31, 0.1);
    const auto r = check_initial_continuity(h1, h2, 0.05, 2.0, cfg);
    EXPECT_TRUE(r.pass) << to_json(r);
}

TEST(EpsMonotonicity, SmallRunPasses) {
    auto cfg = small_config(4);
    const auto r = check_eps_monotonicity(bump(31, 0.1), 1e-2, 1e-3, cfg);
    EXPECT_TRUE(r.pass) << to_json(r);
    EXPECT_THROW(check_eps_monotonicity(bump(31, 0.1), 1e-3, 1e-2, cfg), InvalidArgument);
}

TEST(Obstacle, StabilityOnConstructedPairs) {
    const auto grid = make_grid(31, 1e-3, 0.2);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int pair = 0; pair < 3; ++pair) {
        const double a1 = coef(rng), a2 = coef(rng), c1 = coef(rng), c2 = coef(rng);
        std::vector<Field> v1, v2;
        for (std::size_t n = 0; n <= grid.n_steps; ++n) {
            Field f1(grid.n_space), f2(grid.n_space);
            for (std::size_t i = 0; i < grid.n_space; ++i) {
                const double t = grid.time(n), x = grid.x(i);
                f1[i] = 0.1 * x * (1 - x) + t * (a1 * std::sin(kPi * x) + c1 * std::sin(3 * kPi * x));
                f2[i] = 0.1 * x * (1 - x) + t * (a2 * std::sin(kPi * x) + c2 * std::sin(5 * kPi * x));
            }
            v1.push_back(std::move(f1));
            v2.push_back(std::move(f2));
        }
        const auto r = check_obstacle_stability(v1, v2, grid);
        EXPECT_TRUE(r.pass) << to_json(r);
        EXPECT_EQ(r.detail("complementarity1"), 0.0);
    }
}

TEST(Gronwall, ClosedForms) {
    // alpha = beta = gamma = 1: 1 + int_0^1 e^{1-s} ds = e.
    auto one = [](double) { return 1.0; };
    EXPECT_NEAR(gronwall_bound(one, one, one, 1.0), std::exp(1.0), 1e-9);
    EXPECT_NEAR(gronwall_bound(one, one, one, 1.0), 2.71828, 1e-5);
    // beta = 0 returns alpha(t).
    auto zero = [](double) { return 0.0; };
    auto lin = [](double s) { return 1.0 + s; };
    EXPECT_EQ(gronwall_bound(lin, zero, one, 0.7), 1.7);
    EXPECT_EQ(gronwall_bound(lin, one, one, 0.0), 1.0);
    EXPECT_THROW(gronwall_bound(one, one, [](double) { return -1.0; }, 1.0), DomainError);
    EXPECT_THROW(gronwall_bound(one, one, one, -1.0), DomainError);
}

TEST(Gronwall, BoundsSolutionOfIntegralInequality) {
    // psi(t) = 2 exp(t^2 / 2) satisfies psi = alpha + int beta gamma psi with
    // alpha = 2, beta = 1, gamma(s) = s; the bound is attained with equality.
    auto alpha = [](double) { return 2.0; };
    auto beta = [](double) { return 1.0; };
    auto gamma = [](double s) { return s; };
    for (double t : {0.3, 1.0, 1.8}) EXPECT_NEAR(gronwall_bound(alpha, beta, gamma, t), 2.0 * std::exp(t * t / 2), 1e-8);
}

TEST(Report, JsonShape) {
    CheckReport r;
    r.check = "gradient";
    r.lhs = 1.0;
    r.rhs = 2.0;
    r.margin_ratio = std::numeric_limits<double>::infinity();
    r.pass = true;
    const auto j = nlohmann::json::parse(to_json(r));
    EXPECT_EQ(j["verdict"], "PASS");
    EXPECT_TRUE(j["margin_ratio"].is_null());
    EXPECT_TRUE(j.contains("std_errors"));
    EXPECT_TRUE(j.contains("config_hash"));
    EXPECT_THROW(r.detail("missing"), InvalidArgument);
}

TEST(Holder, RoughAndSmoothFields) {
    const std::size_t n = 255;
    const double dx = 1.0 / 256.0;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<Field> walks;
    for (int k = 0; k < 20; ++k) {
        Field f(n);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) f[i] = (s += g(rng) * std::sqrt(dx));
        walks.push_back(f);
    }
    EXPECT_NEAR(spatial_holder_exponent(walks, dx), 0.5, 0.1);
    EXPECT_NEAR(spatial_holder_exponent({bump(n, 1.0)}, dx), 1.0, 0.1);
}

}  // namespace
}  // namespace rspde
