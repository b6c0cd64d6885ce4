#include "rspde/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rspde/cli/output.hpp"
#include "rspde/parallel.hpp"

namespace rspde::cli {

namespace {

std::string stream_name(std::size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "path_%04zu", j);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InvalidArgument("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

CheckConfig make_check_config(const ExperimentConfig& c, double m_scale) {
    CheckConfig cfg;
    cfg.setup.mode = build_mode(c.run);
    cfg.setup.model = build_model(c.model);
    cfg.setup.grid = build_grid(c.grid);
    cfg.setup.n_paths = c.run.n_paths;
    cfg.setup.seed = c.run.seed;
    cfg.m_scale = m_scale;
    cfg.delta = c.check.delta;
    cfg.n_sigma = c.check.n_sigma;
    cfg.directions = direction_dictionary(c.grid.n_space, c.check.n_directions);
    return cfg;
}

void add_clip_notice(CheckReport& r, const std::string& name, const InitialField& f) {
    if (f.clip_distance > 0.0)
        r.notices.push_back(name + " clipped onto K0, L2 distance " + format_double(f.clip_distance));
}

void write_reports(const std::vector<CheckReport>& reports, const std::string& hash, const std::string& dir) {
    nlohmann::ordered_json j;
    bool pass = true;
    for (const auto& r : reports) pass = pass && r.pass;
    j["config_hash"] = hash;
    j["verdict"] = pass ? "PASS" : "FAIL";
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) j["reports"].push_back(nlohmann::ordered_json::parse(to_json(r)));
    write_file(join(dir, "report.json"), j.dump(2) + "\n");
    write_file(join(dir, "summary.csv"), "# config_hash=" + hash + "\n" + summary_csv(reports));
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig config, const CommandOptions& options) {
    if (options.seed) config.run.seed = *options.seed;
    if (options.paths) {
        if (*options.paths == 0) throw InvalidArgument("--paths must be positive");
        config.run.n_paths = *options.paths;
    }
    return config;
}

int cmd_simulate(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log) {
    const auto c = apply_overrides(config, options);
    const auto grid = build_grid(c.grid);
    const auto model = build_model(c.model);
    const auto mode = build_mode(c.run);
    const auto h = initial_field(c.check.h, grid.n_space);
    const auto save_at = c.run.save_at.empty() ? all_step_times(grid) : c.run.save_at;
    const std::string hash = config_hash(c);
    ensure_dir(options.out_dir);

    const bool csv = c.run.format != "binary";
    const bool binary = c.run.format != "csv";
    struct PathSummary {
        double running_max = 0.0;
        double mass = 0.0;
        double complementarity = 0.0;
    };
    std::vector<PathSummary> summaries(c.run.n_paths);
    parallel_for(c.run.n_paths, [&](std::size_t j) {
        const auto traj = solve_path(h.field, mode, model, grid, NoisePlan{c.run.seed, j}, save_at);
        const Provenance prov{hash, c.run.seed, j, describe(mode), model.name};
        if (csv) write_file(join(options.out_dir, stream_name(j) + ".csv"), trajectory_csv(traj, prov));
        if (binary) write_file(join(options.out_dir, stream_name(j) + ".bin"), trajectory_binary(traj, prov));
        summaries[j].running_max = traj.running_max_abs;
        if (traj.ledger) {
            summaries[j].mass = traj.ledger->total();
            summaries[j].complementarity = traj.ledger->complementarity();
        }
    });

    nlohmann::ordered_json m;
    m["command"] = "simulate";
    m["config_hash"] = hash;
    m["seed"] = c.run.seed;
    m["n_paths"] = c.run.n_paths;
    m["mode"] = describe(mode);
    m["model"] = model.name;
    m["grid"] = {{"n_space", grid.n_space}, {"dx", grid.dx}, {"dt", grid.dt}, {"n_steps", grid.n_steps}};
    m["initial_clip_distance"] = h.clip_distance;
    m["files"] = nlohmann::ordered_json::array();
    m["paths"] = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < c.run.n_paths; ++j) {
        if (csv) m["files"].push_back(stream_name(j) + ".csv");
        if (binary) m["files"].push_back(stream_name(j) + ".bin");
        nlohmann::ordered_json p{{"stream", j}, {"running_max_abs", summaries[j].running_max}};
        if (std::holds_alternative<Reflected>(mode)) {
            p["reflection_mass"] = summaries[j].mass;
            p["complementarity"] = summaries[j].complementarity;
        }
        m["paths"].push_back(p);
    }
    m["config"] = serialize_config(c);
    write_file(join(options.out_dir, "manifest.json"), m.dump(2) + "\n");
    log << "simulate: " << c.run.n_paths << " path(s), config_hash " << hash << ", output in " << options.out_dir
        << "\n";
    return kPass;
}

std::vector<CheckReport> run_checks(const ExperimentConfig& c, const std::string& kind_override, double m_scale) {
    const std::string kind = kind_override.empty() ? c.check.kind : kind_override;
    const auto cfg = make_check_config(c, m_scale);
    const std::size_t n = c.grid.n_space;
    const std::string hash = config_hash(c);
    const auto h = initial_field(c.check.h, n);
    const auto h1 = initial_field(c.check.h1, n);
    const auto h2 = initial_field(c.check.h2, n);

    std::vector<CheckReport> out;
    auto finish = [&](CheckReport r) {
        r.config_hash = hash;
        out.push_back(std::move(r));
    };
    if (kind == "continuity") {
        auto r = check_initial_continuity(h1.field, h2.field, cfg.setup.grid.t_final(), c.check.p, cfg);
        add_clip_notice(r, "h1", h1);
        add_clip_notice(r, "h2", h2);
        finish(std::move(r));
        return out;
    }
    if (kind == "comparison") {
        auto r = check_eps_monotonicity(h.field, c.check.eps_coarse, c.check.eps_fine, cfg);
        add_clip_notice(r, "h", h);
        finish(std::move(r));
        return out;
    }
    const auto phi = build_functional(c.check.functional, n);
    const auto times = c.check.times.empty() ? std::vector<double>{cfg.setup.grid.t_final()} : c.check.times;
    for (double t : times) {
        CheckReport r;
        if (kind == "gradient")
            r = check_gradient_estimate(phi, h.field, t, cfg);
        else if (kind == "variance")
            r = check_variance_bound(phi, h.field, t, cfg);
        else if (kind == "lipschitz")
            r = check_lipschitz_Pt(phi, h.field, t, cfg);
        else if (kind == "log-harnack")
            r = check_log_harnack(phi, h1.field, h2.field, t, cfg);
        else
            throw InvalidArgument("unknown check '" + kind + "'");
        r.labels.emplace_back("functional", phi.describe());
        if (kind == "log-harnack") {
            add_clip_notice(r, "h1", h1);
            add_clip_notice(r, "h2", h2);
        } else {
            add_clip_notice(r, "h", h);
        }
        finish(std::move(r));
    }
    return out;
}

std::string summary_csv(const std::vector<CheckReport>& reports) {
    std::ostringstream os;
    os << "check,t,lhs,rhs,lhs_se,rhs_se,slack,margin_ratio,verdict\n";
    for (const auto& r : reports) {
        double t = 0.0;
        for (const auto& [k, v] : r.inputs)
            if (k == "t") t = v;
        os << r.check << ',' << format_double(t) << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
           << format_double(r.lhs_se) << ',' << format_double(r.rhs_se) << ',' << format_double(r.slack) << ','
           << format_double(r.margin_ratio) << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
    }
    return os.str();
}

int cmd_check(const ExperimentConfig& config, const std::string& kind, const CommandOptions& options,
              std::ostream& log) {
    const auto c = apply_overrides(config, options);
    const auto reports = run_checks(c, kind, options.m_scale);
    ensure_dir(options.out_dir);
    write_reports(reports, config_hash(c), options.out_dir);
    bool pass = true;
    for (const auto& r : reports) {
        double t = 0.0;
        for (const auto& [k, v] : r.inputs)
            if (k == "t") t = v;
        log << r.check << " t=" << format_double(t) << ": lhs=" << format_double(r.lhs)
            << " rhs=" << format_double(r.rhs) << " slack=" << format_double(r.slack) << " -> "
            << (r.pass ? "PASS" : "FAIL") << "\n";
        for (const auto& n : r.notices) log << "  notice: " << n << "\n";
        pass = pass && r.pass;
    }
    return pass ? kPass : kFail;
}

std::string bounds_csv(double L_b, double L_sigma, double kappa1, const std::vector<double>& times, double dist2) {
    const BoundProfile profile(L_b, L_sigma);
    std::ostringstream os;
    os << "t,M,zeta,int_exp_neg_zeta,harnack_rhs\n";
    for (double t : times) {
        os << format_double(t) << ',' << format_double(profile.M()) << ',' << format_double(profile.zeta(t)) << ','
           << format_double(profile.integral_exp_neg_zeta(t)) << ','
           << format_double(harnack_rhs(t, dist2, profile, kappa1)) << '\n';
    }
    return os.str();
}

int cmd_converge_eps(const ExperimentConfig& config, const CommandOptions& options, std::ostream& log) {
    const auto c = apply_overrides(config, options);
    const auto cfg = make_check_config(c, options.m_scale);
    const auto h = initial_field(c.check.h, c.grid.n_space);
    std::vector<ConvergenceRow> rows;
    auto r = check_penalization_convergence(h.field, c.run.eps_ladder, cfg, &rows);
    const std::string hash = config_hash(c);
    r.config_hash = hash;
    add_clip_notice(r, "h", h);

    ensure_dir(options.out_dir);
    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n# seed=" << c.run.seed << "\n"
        << "eps,mean_sup_distance,std_error,n_paths\n";
    for (const auto& row : rows)
        csv << format_double(row.eps) << ',' << format_double(row.sup_distance.mean) << ','
            << format_double(row.sup_distance.std_error) << ',' << row.sup_distance.n_paths << '\n';
    write_file(join(options.out_dir, "converge.csv"), csv.str());
    write_reports({r}, hash, options.out_dir);
    for (const auto& row : rows)
        log << "eps=" << format_double(row.eps) << ": E sup|u_eps - u| = " << format_double(row.sup_distance.mean)
            << " +- " << format_double(row.sup_distance.std_error) << "\n";
    log << "converge-eps -> " << (r.pass ? "PASS" : "FAIL") << "\n";
    return r.pass ? kPass : kFail;
}

}  // namespace rspde::cli
