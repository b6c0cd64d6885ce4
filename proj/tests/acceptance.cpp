// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rspde/cli/commands.hpp"
#include "rspde/cli/config.hpp"
#include "rspde/cli/output.hpp"
#include "rspde/coefficients.hpp"
#include "rspde/heat.hpp"
#include "rspde/solver.hpp"
#include "rspde/verify.hpp"

namespace fs = std::filesystem;
using namespace rspde;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string config_path(const std::string& name) { return std::string(RSPDE_SOURCE_DIR) + "/configs/" + name; }

Field sine(std::size_t n, double scale) {
    Field h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = scale * std::sin(kPi * double(i + 1) / double(n + 1));
    return h;
}

CheckConfig standard_check(std::size_t n_paths, std::uint64_t seed, double t_final) {
    CheckConfig cfg;
    cfg.setup.mode = Reflected{};
    cfg.setup.model = standard_model();
    cfg.setup.grid = make_grid(63, 1e-3, t_final);
    cfg.setup.n_paths = n_paths;
    cfg.setup.seed = seed;
    return cfg;
}

std::string report_line(const CheckReport& r) {
    return r.check + " lhs=" + num(r.lhs) + " rhs=" + num(r.rhs) + " slack=" + num(r.slack) + " " +
           (r.pass ? "PASS" : "FAIL");
}

double heat_error(std::size_t n, double dt) {
    const auto grid = make_grid(n, dt, 0.1);
    const Field e1 = eigenfunction(1, n);
    const auto traj = solve_path(e1, Reflected{}, heat_only_model(), grid, NoisePlan{1, 0});
    Field exact = e1;
    exact *= std::exp(-kPi * kPi * 0.1 / 2);
    return l2_norm(traj.final_state() - exact, grid.dx);
}

Outcome heat_exactness() {
    const double coarse = heat_error(127, 1e-4);
    const double fine = heat_error(255, 5e-5);
    return {coarse < 1e-3 && coarse / fine >= 1.5,
            "err127=" + num(coarse) + " err255=" + num(fine) + " ratio=" + num(coarse / fine)};
}

Outcome complementarity() {
    const auto grid = make_grid(63, 1e-3, 2.0);
    // Start on the constraint so the reflection is active from the first step.
    const Field h(63, 0.0);
    const auto model = standard_model();
    PathIntegrator path(h, Reflected{}, model, grid, NoisePlan{99, 0}, true);
    bool states_ok = true;
    while (path.step() < grid.n_steps) {
        path.advance();
        for (double u : path.state())
            if (!(u >= 0.0) || std::signbit(u)) states_ok = false;
    }
    const auto* ledger = path.ledger();
    double pairing = 0.0;
    bool mass_ok = true;
    // Re-run to pair every recorded cell with the post-projection state.
    PathIntegrator replay(h, Reflected{}, model, grid, NoisePlan{99, 0});
    for (std::size_t n = 1; n <= grid.n_steps; ++n) {
        replay.advance();
        const auto cells = ledger->cells_at(n - 1);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!(cells[i] >= 0.0)) mass_ok = false;
            pairing += replay.state()[i] * cells[i];
        }
    }
    return {states_ok && mass_ok && pairing == 0.0 && ledger->complementarity() == 0.0 && ledger->total() > 0.0,
            "steps=" + std::to_string(grid.n_steps) + " sum_u_deta=" + num(pairing) + " total_mass=" +
                num(ledger->total())};
}

Outcome eps_monotonicity() {
    const auto cfg = standard_check(20, 3, 0.5);
    const auto r = check_eps_monotonicity(sine(63, 0.1), 1e-2, 1e-3, cfg);
    return {r.pass, "violation_fraction=" + num(r.lhs) + " (< 1e-3) max_deficit=" + num(r.detail("max_deficit"))};
}

Outcome penalization_convergence() {
    const auto cfg = standard_check(20, 3, 0.5);
    const auto r = check_penalization_convergence(sine(63, 0.1), {1e-2, 1e-3, 1e-4}, cfg);
    return {r.pass, "sup_dist=" + num(r.detail("sup_distance0")) + "," + num(r.detail("sup_distance1")) + "," +
                        num(r.detail("sup_distance2")) + " reflected_min=" + num(r.detail("reflected_min"))};
}

Outcome tangent() {
    const auto cfg = standard_check(10, 5, 0.25);
    const auto r = check_tangent_consistency(sine(63, 0.3), sine(63, 1.0), 1e-2, 0.25, 1e-4, cfg, 0.01);
    return {r.pass, "max_rel_l2=" + num(r.lhs) + " (< 0.01) mean=" + num(r.detail("mean_rel_error"))};
}

Outcome gradient() {
    const auto config = cli::load_config(config_path("standard_gradient.yaml"));
    const auto ok = cli::run_checks(config, "gradient");
    const auto injected = cli::run_checks(config, "gradient", 1e-6);
    bool pass = true;
    for (const auto& r : ok) pass = pass && r.pass;
    for (const auto& r : injected) pass = pass && !r.pass;
    return {pass, "[" + report_line(ok.front()) + "] [M*1e-6: " + report_line(injected.front()) + "]"};
}

Outcome log_harnack() {
    const auto config = cli::load_config(config_path("log_harnack.yaml"));
    const auto reports = cli::run_checks(config, "log-harnack");
    bool pass = !reports.empty();
    std::string detail;
    for (const auto& r : reports) {
        pass = pass && r.pass;
        detail += "[t=" + num(r.inputs.front().second) + " " + report_line(r) + "] ";
    }
    auto cfg = standard_check(config.run.n_paths, config.run.seed, 0.25);
    const auto phi = cli::build_functional(config.check.functional, 63);
    const Field h1 = cli::initial_field(config.check.h1, 63).field;
    const auto control = check_log_harnack(phi, h1, h1, 0.25, cfg);
    const double term = control.detail("harnack_term");
    pass = pass && control.pass && term == 0.0;
    return {pass, detail + "control: harnack_term=" + num(term) + " " + (control.pass ? "PASS" : "FAIL")};
}

Outcome variance_lipschitz() {
    const auto config = cli::load_config(config_path("standard_gradient.yaml"));
    const auto var = cli::run_checks(config, "variance");
    const auto lip = cli::run_checks(config, "lipschitz");
    bool pass = true;
    for (const auto& r : var) pass = pass && r.pass;
    for (const auto& r : lip) pass = pass && r.pass;

    // Indicator functional with its jump at the starting point. At t = 0 the
    // difference quotient grows like 1/delta; at t > 0 it stays bounded.
    auto cfg = standard_check(1000, 17, 0.1);
    const Field h = sine(63, 0.3);
    const Field e1 = eigenfunction(1, 63);
    const auto cyl = Functional::bounded_cylinder(e1, inner(h, e1, cfg.setup.grid.dx));
    const auto dirs = direction_dictionary(63, 8);
    std::string proxies;
    for (double delta : {0.05, 0.0125}) {
        const auto at_zero = estimate_grad_Pt(cyl, h, 0.0, dirs, delta, cfg.setup);
        const auto smoothed = estimate_grad_Pt(cyl, h, 0.1, dirs, delta, cfg.setup);
        pass = pass && std::isfinite(smoothed.value);
        proxies += " delta=" + num(delta) + ": t=0 " + num(at_zero.value) + ", t=0.1 " + num(smoothed.value);
    }
    return {pass, "[" + report_line(var.front()) + "] [" + report_line(lip.front()) + "] cylinder proxy" + proxies};
}

Outcome continuity() {
    const auto cfg = standard_check(200, 9, 0.5);
    const Field h1 = sine(63, 0.3);
    const Field h2 = h1 + sine(63, 0.1);
    const auto r = check_initial_continuity(h1, h2, 0.5, 2.0, cfg, {1.0, 0.5, 0.25});
    return {r.pass, "max/min ratio=" + num(r.rhs > 0.0 ? 2.0 * r.lhs / r.rhs : 0.0) + " " + report_line(r)};
}

Outcome bounds_arithmetic() {
    const double sp = std::sqrt(kPi);
    const double terms[5] = {3.0, 9.0 / sp, 8.0, 144.0 / sp, 864.0 / sp};
    double independent = 0.0;
    for (double v : terms) independent = std::max(independent, v);
    const double M = constant_M(1.0, 1.0);
    const bool m_ok = std::abs(M - 864.0 / sp) <= 1e-12 * M && std::abs(M - independent) <= 1e-12 * M;

    const BoundProfile profile(1.0, 1.0);
    const std::size_t n = 1000000;
    double trap = 0.5 * (std::exp(-zeta(0.0, 1.0, 1.0)) + std::exp(-zeta(1.0, 1.0, 1.0)));
    for (std::size_t i = 1; i < n; ++i) trap += std::exp(-zeta(double(i) / double(n), 1.0, 1.0));
    trap /= double(n);
    const double quad = profile.integral_exp_neg_zeta(1.0);
    const double rel = std::abs(quad - trap) / trap;

    bool decreasing = true;
    double prev = harnack_rhs(0.05, 1.0, profile, 1.1);
    for (int k = 2; k <= 20; ++k) {
        const double cur = harnack_rhs(0.05 * k, 1.0, profile, 1.1);
        if (!(cur < prev)) decreasing = false;
        prev = cur;
    }
    return {m_ok && rel < 1e-6 && decreasing,
            "M=" + num(M) + " int_exp_neg_zeta=" + num(quad) + " trap_rel=" + num(rel) +
                (decreasing ? " harnack_rhs decreasing" : " harnack_rhs NOT decreasing")};
}

Outcome obstacle_stability() {
    const auto grid = make_grid(63, 1e-3, 0.5);
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    bool pass = true;
    double worst = 0.0;
    for (int pair = 0; pair < 10; ++pair) {
        double c1[4], c2[4];
        for (int m = 0; m < 4; ++m) {
            c1[m] = coef(rng);
            c2[m] = coef(rng);
        }
        std::vector<Field> v1, v2;
        for (std::size_t n = 0; n <= grid.n_steps; ++n) {
            Field f1(grid.n_space), f2(grid.n_space);
            const double t = grid.time(n);
            for (std::size_t i = 0; i < grid.n_space; ++i) {
                const double x = grid.x(i);
                f1[i] = 0.2 * x * (1 - x);
                f2[i] = 0.2 * x * (1 - x);
                for (int m = 0; m < 4; ++m) {
                    f1[i] += t * c1[m] * std::sin((m + 1) * kPi * x);
                    f2[i] += t * c2[m] * std::sin((m + 1) * kPi * x);
                }
            }
            v1.push_back(std::move(f1));
            v2.push_back(std::move(f2));
        }
        const auto r = check_obstacle_stability(v1, v2, grid);
        pass = pass && r.pass;
        worst = std::max(worst, r.lhs / r.rhs);
    }
    return {pass, "10 pairs, worst |z1-z2| / (2|v1-v2|)=" + num(worst)};
}

std::vector<std::string> csv_contents(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::string> out;
    for (const auto& f : files) out.push_back(f.filename().string() + "\n" + cli::strip_comments(cli::read_file(f)));
    return out;
}

std::vector<std::string> run_cli(const std::string& threads, const fs::path& root) {
    ::setenv("RSPDE_THREADS", threads.c_str(), 1);
    std::ostringstream log;
    auto config = cli::load_config(config_path("converge_eps.yaml"));
    config.run.n_paths = 6;
    config.run.format = "csv";
    cli::CommandOptions opts;
    opts.out_dir = (root / ("sim" + threads)).string();
    fs::create_directories(opts.out_dir);
    cli::cmd_simulate(config, opts, log);
    auto files = csv_contents(opts.out_dir);
    opts.out_dir = (root / ("conv" + threads)).string();
    fs::create_directories(opts.out_dir);
    cli::cmd_converge_eps(config, opts, log);
    for (auto& f : csv_contents(opts.out_dir)) files.push_back(std::move(f));
    return files;
}

Outcome reproducibility() {
    const fs::path root = fs::temp_directory_path() / ("rspde_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const char* saved = std::getenv("RSPDE_THREADS");
    const std::string restore = saved ? saved : "";
    const auto one = run_cli("1", root);
    const auto four = run_cli("4", root);
    if (saved)
        ::setenv("RSPDE_THREADS", restore.c_str(), 1);
    else
        ::unsetenv("RSPDE_THREADS");
    fs::remove_all(root);
    const bool same = !one.empty() && one == four;
    return {same, std::to_string(one.size()) + " csv files, RSPDE_THREADS 1 vs 4 " +
                      (same ? "bitwise identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
    // Optional arguments select criteria by number; none runs all.
    std::vector<std::size_t> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::stoul(argv[a]));
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"heat-flow exactness", heat_exactness},
        {"discrete complementarity", complementarity},
        {"eps-monotonicity", eps_monotonicity},
        {"penalization convergence", penalization_convergence},
        {"tangent consistency", tangent},
        {"gradient estimate", gradient},
        {"log-Harnack", log_harnack},
        {"variance and Lipschitz", variance_lipschitz},
        {"initial-data continuity", continuity},
        {"bounds arithmetic", bounds_arithmetic},
        {"obstacle stability", obstacle_stability},
        {"reproducibility", reproducibility},
    };
    int failures = 0;
    std::size_t ran = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), k + 1) == selected.end()) continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, ran);
    return failures == 0 ? 0 : 1;
}
