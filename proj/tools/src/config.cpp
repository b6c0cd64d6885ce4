#include "rspde/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "rspde/cli/output.hpp"

namespace rspde::cli {

namespace {

int line_of(const YAML::Node& n) {
    const auto mark = n.Mark();
    return mark.line >= 0 ? mark.line + 1 : 0;
}

void require_map(const YAML::Node& n, const std::string& field, const std::set<std::string>& allowed) {
    if (!n.IsMap()) throw ConfigError(line_of(n), field, "expected a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key))
            throw ConfigError(line_of(kv.first), field.empty() ? key : field + "." + key, "unknown key");
    }
}

double as_double(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw ConfigError(line_of(n), field, "expected a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(n, v) || !std::isfinite(v))
        throw ConfigError(line_of(n), field, "expected a finite number, got '" + n.Scalar() + "'");
    return v;
}

std::uint64_t as_count(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw ConfigError(line_of(n), field, "expected a nonnegative integer");
    const std::string& s = n.Scalar();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(line_of(n), field, "expected a nonnegative integer, got '" + s + "'");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigError(line_of(n), field, "integer out of range: '" + s + "'");
    }
}

std::string as_string(const YAML::Node& n, const std::string& field) {
    if (!n.IsScalar()) throw ConfigError(line_of(n), field, "expected a string");
    return n.Scalar();
}

std::vector<double> as_list(const YAML::Node& n, const std::string& field) {
    if (!n.IsSequence()) throw ConfigError(line_of(n), field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

void one_of(const YAML::Node& n, const std::string& field, const std::string& value,
            const std::set<std::string>& choices) {
    if (choices.contains(value)) return;
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    throw ConfigError(line_of(n), field, "'" + value + "' is not one of {" + list + "}");
}

void parse_grid(const YAML::Node& n, GridSpec& g) {
    require_map(n, "grid", {"n_space", "dt", "t_final"});
    if (n["n_space"]) {
        const auto v = as_count(n["n_space"], "grid.n_space");
        if (v < 3) throw ConfigError(line_of(n["n_space"]), "grid.n_space", "must be at least 3");
        g.n_space = static_cast<std::size_t>(v);
    }
    if (n["dt"]) {
        g.dt = as_double(n["dt"], "grid.dt");
        if (!(g.dt > 0.0)) throw ConfigError(line_of(n["dt"]), "grid.dt", "must be positive");
    }
    if (n["t_final"]) g.t_final = as_double(n["t_final"], "grid.t_final");
    try {
        make_grid(g.n_space, g.dt, g.t_final);
    } catch (const InvalidArgument& e) {
        throw ConfigError(line_of(n["t_final"] ? n["t_final"] : n), "grid.t_final", e.what());
    }
}

void parse_model(const YAML::Node& n, ModelSpec& m) {
    require_map(n, "model", {"name", "params", "penalty", "L_b", "L_sigma", "kappa1", "kappa2"});
    if (n["name"]) {
        m.name = as_string(n["name"], "model.name");
        const auto names = catalogue_names();
        one_of(n["name"], "model.name", m.name, {names.begin(), names.end()});
    }
    if (n["params"]) {
        const auto defaults = catalogue_defaults(m.name);
        std::set<std::string> allowed;
        for (const auto& [k, _] : defaults) allowed.insert(k);
        require_map(n["params"], "model.params", allowed);
        m.params.clear();
        for (const auto& kv : n["params"]) {
            const auto key = kv.first.as<std::string>();
            m.params[key] = as_double(kv.second, "model.params." + key);
        }
    }
    if (n["penalty"]) {
        m.penalty = as_string(n["penalty"], "model.penalty");
        one_of(n["penalty"], "model.penalty", m.penalty, {"negative_part", "arctan_square"});
    }
    auto opt = [&](const char* key, std::optional<double>& slot) {
        if (n[key]) {
            const double v = as_double(n[key], std::string("model.") + key);
            if (v < 0.0) throw ConfigError(line_of(n[key]), std::string("model.") + key, "must be nonnegative");
            slot = v;
        }
    };
    opt("L_b", m.L_b);
    opt("L_sigma", m.L_sigma);
    opt("kappa1", m.kappa1);
    opt("kappa2", m.kappa2);
    try {
        build_model(m);
    } catch (const InvalidArgument& e) {
        throw ConfigError(line_of(n), "model", e.what());
    }
}

void parse_run(const YAML::Node& n, RunSpec& r) {
    require_map(n, "run", {"mode", "eps", "eps_ladder", "n_paths", "seed", "save_at", "format"});
    if (n["mode"]) {
        r.mode = as_string(n["mode"], "run.mode");
        one_of(n["mode"], "run.mode", r.mode, {"reflected", "penalized"});
    }
    if (n["eps"]) {
        r.eps = as_double(n["eps"], "run.eps");
        if (!(r.eps > 0.0)) throw ConfigError(line_of(n["eps"]), "run.eps", "must be positive");
    }
    if (n["eps_ladder"]) {
        r.eps_ladder = as_list(n["eps_ladder"], "run.eps_ladder");
        for (double e : r.eps_ladder)
            if (!(e > 0.0)) throw ConfigError(line_of(n["eps_ladder"]), "run.eps_ladder", "entries must be positive");
    }
    if (n["n_paths"]) {
        r.n_paths = static_cast<std::size_t>(as_count(n["n_paths"], "run.n_paths"));
        if (r.n_paths == 0) throw ConfigError(line_of(n["n_paths"]), "run.n_paths", "must be positive");
    }
    if (n["seed"]) r.seed = as_count(n["seed"], "run.seed");
    if (n["save_at"]) r.save_at = as_list(n["save_at"], "run.save_at");
    if (n["format"]) {
        r.format = as_string(n["format"], "run.format");
        one_of(n["format"], "run.format", r.format, {"csv", "binary", "both"});
    }
}

void parse_functional(const YAML::Node& n, FunctionalSpec& f) {
    require_map(n, "check.functional", {"kind", "direction", "a", "offset", "lo", "hi", "threshold"});
    if (n["kind"]) {
        f.kind = as_string(n["kind"], "check.functional.kind");
        one_of(n["kind"], "check.functional.kind", f.kind,
               {"exp_neg_pair", "clipped_affine", "bounded_cylinder", "constant"});
    }
    if (n["direction"]) f.direction = as_list(n["direction"], "check.functional.direction");
    if (n["a"]) f.a = as_double(n["a"], "check.functional.a");
    if (n["offset"]) f.offset = as_double(n["offset"], "check.functional.offset");
    if (n["lo"]) f.lo = as_double(n["lo"], "check.functional.lo");
    if (n["hi"]) f.hi = as_double(n["hi"], "check.functional.hi");
    if (n["threshold"]) f.threshold = as_double(n["threshold"], "check.functional.threshold");
    if (f.a <= 0.0) throw ConfigError(line_of(n), "check.functional.a", "must be positive");
    if (f.lo > f.hi) throw ConfigError(line_of(n), "check.functional.lo", "must not exceed hi");
}

void parse_check(const YAML::Node& n, CheckSpec& c) {
    require_map(n, "check", {"kind", "times", "functional", "h", "h1", "h2", "p", "n_sigma", "delta", "n_directions",
                             "eps_coarse", "eps_fine"});
    if (n["kind"]) {
        c.kind = as_string(n["kind"], "check.kind");
        one_of(n["kind"], "check.kind", c.kind,
               {"gradient", "log-harnack", "variance", "lipschitz", "continuity", "comparison"});
    }
    if (n["times"]) {
        c.times = as_list(n["times"], "check.times");
    }
    if (n["functional"]) parse_functional(n["functional"], c.functional);
    if (n["h"]) c.h = as_list(n["h"], "check.h");
    if (n["h1"]) c.h1 = as_list(n["h1"], "check.h1");
    if (n["h2"]) c.h2 = as_list(n["h2"], "check.h2");
    if (n["p"]) {
        c.p = as_double(n["p"], "check.p");
        if (c.p < 1.0) throw ConfigError(line_of(n["p"]), "check.p", "must be at least 1");
    }
    if (n["n_sigma"]) c.n_sigma = as_double(n["n_sigma"], "check.n_sigma");
    if (n["delta"]) c.delta = as_double(n["delta"], "check.delta");
    if (n["n_directions"]) {
        c.n_directions = static_cast<std::size_t>(as_count(n["n_directions"], "check.n_directions"));
        if (c.n_directions == 0) throw ConfigError(line_of(n["n_directions"]), "check.n_directions", "must be positive");
    }
    if (n["eps_coarse"]) c.eps_coarse = as_double(n["eps_coarse"], "check.eps_coarse");
    if (n["eps_fine"]) c.eps_fine = as_double(n["eps_fine"], "check.eps_fine");
    if (!(c.eps_fine > 0.0 && c.eps_fine < c.eps_coarse))
        throw ConfigError(line_of(n), "check.eps_fine", "need 0 < eps_fine < eps_coarse");
}

std::string list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s + "]";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.mark.line + 1, "", "YAML syntax error: " + e.msg);
    }
    ExperimentConfig cfg;
    if (root.IsNull()) return cfg;
    require_map(root, "", {"grid", "model", "run", "check"});
    if (root["grid"]) parse_grid(root["grid"], cfg.grid);
    if (root["model"]) parse_model(root["model"], cfg.model);
    if (root["run"]) parse_run(root["run"], cfg.run);
    if (root["check"]) parse_check(root["check"], cfg.check);

    const auto grid = build_grid(cfg.grid);
    auto check_times = [&](const std::vector<double>& times, const YAML::Node& node, const std::string& field) {
        for (double t : times) {
            if (t < 0.0 || t > grid.t_final() * (1.0 + 1e-12))
                throw ConfigError(line_of(node), field, "time " + format_double(t) + " outside [0, t_final]");
            try {
                step_index(grid, t);
            } catch (const InvalidArgument& e) {
                throw ConfigError(line_of(node), field, e.what());
            }
        }
    };
    if (root["run"] && root["run"]["save_at"]) check_times(cfg.run.save_at, root["run"]["save_at"], "run.save_at");
    if (root["check"] && root["check"]["times"]) check_times(cfg.check.times, root["check"]["times"], "check.times");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "", "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "grid:\n"
       << "  n_space: " << c.grid.n_space << "\n"
       << "  dt: " << format_double(c.grid.dt) << "\n"
       << "  t_final: " << format_double(c.grid.t_final) << "\n";
    os << "model:\n"
       << "  name: " << c.model.name << "\n"
       << "  params: {";
    bool first = true;
    for (const auto& [k, v] : c.model.params) {
        os << (first ? "" : ", ") << k << ": " << format_double(v);
        first = false;
    }
    os << "}\n"
       << "  penalty: " << c.model.penalty << "\n";
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) os << "  " << key << ": " << format_double(*v) << "\n";
    };
    opt("L_b", c.model.L_b);
    opt("L_sigma", c.model.L_sigma);
    opt("kappa1", c.model.kappa1);
    opt("kappa2", c.model.kappa2);
    os << "run:\n"
       << "  mode: " << c.run.mode << "\n"
       << "  eps: " << format_double(c.run.eps) << "\n"
       << "  eps_ladder: " << list(c.run.eps_ladder) << "\n"
       << "  n_paths: " << c.run.n_paths << "\n"
       << "  seed: " << c.run.seed << "\n"
       << "  save_at: " << list(c.run.save_at) << "\n"
       << "  format: " << c.run.format << "\n";
    const auto& f = c.check.functional;
    os << "check:\n"
       << "  kind: " << c.check.kind << "\n"
       << "  times: " << list(c.check.times) << "\n"
       << "  functional:\n"
       << "    kind: " << f.kind << "\n"
       << "    direction: " << list(f.direction) << "\n"
       << "    a: " << format_double(f.a) << "\n"
       << "    offset: " << format_double(f.offset) << "\n"
       << "    lo: " << format_double(f.lo) << "\n"
       << "    hi: " << format_double(f.hi) << "\n"
       << "    threshold: " << format_double(f.threshold) << "\n"
       << "  h: " << list(c.check.h) << "\n"
       << "  h1: " << list(c.check.h1) << "\n"
       << "  h2: " << list(c.check.h2) << "\n"
       << "  p: " << format_double(c.check.p) << "\n"
       << "  n_sigma: " << format_double(c.check.n_sigma) << "\n"
       << "  delta: " << format_double(c.check.delta) << "\n"
       << "  n_directions: " << c.check.n_directions << "\n"
       << "  eps_coarse: " << format_double(c.check.eps_coarse) << "\n"
       << "  eps_fine: " << format_double(c.check.eps_fine) << "\n";
    return os.str();
}

std::string config_hash(const ExperimentConfig& config) { return fnv1a_hex(serialize_config(config)); }

SpaceTimeGrid build_grid(const GridSpec& spec) { return make_grid(spec.n_space, spec.dt, spec.t_final); }

PenaltyKind penalty_from_string(const std::string& name) {
    if (name == "negative_part") return PenaltyKind::negative_part;
    if (name == "arctan_square") return PenaltyKind::arctan_square;
    throw InvalidArgument("unknown penalty '" + name + "'");
}

CoefficientModel build_model(const ModelSpec& spec) {
    auto m = make_catalogue_model(spec.name, spec.params, penalty_from_string(spec.penalty));
    if (spec.L_b) m.L_b = *spec.L_b;
    if (spec.L_sigma) m.L_sigma = *spec.L_sigma;
    if (spec.kappa1) m.kappa1 = *spec.kappa1;
    if (spec.kappa2) m.kappa2 = *spec.kappa2;
    // Declared constants must hold; the diffusion bounds only matter when declared.
    const auto report = validate_model(m, -10.0, 10.0);
    if (!report.lipschitz_b) throw InvalidArgument("declared L_b is smaller than the sampled Lipschitz ratio of b");
    if (!report.lipschitz_sigma)
        throw InvalidArgument("declared L_sigma is smaller than the sampled Lipschitz ratio of sigma");
    if ((spec.kappa1 || spec.kappa2) && !report.sigma_bounds)
        throw InvalidArgument("declared kappa1 <= |sigma| <= kappa2 does not hold");
    return m;
}

Mode build_mode(const RunSpec& spec) {
    if (spec.mode == "penalized") return Penalized{spec.eps};
    return Reflected{};
}

Field sine_series(const std::vector<double>& coefficients, std::size_t n_space) {
    Field f(n_space, 0.0);
    const double dx = 1.0 / static_cast<double>(n_space + 1);
    for (std::size_t n = 0; n < coefficients.size(); ++n) {
        if (coefficients[n] == 0.0) continue;
        for (std::size_t i = 0; i < n_space; ++i)
            f[i] += coefficients[n] *
                    std::sin(static_cast<double>(n + 1) * std::numbers::pi * static_cast<double>(i + 1) * dx);
    }
    return f;
}

InitialField initial_field(const std::vector<double>& coefficients, std::size_t n_space) {
    InitialField out;
    out.field = sine_series(coefficients, n_space);
    const double dx = 1.0 / static_cast<double>(n_space + 1);
    out.clip_distance = l2_norm(negative_part(out.field), dx);
    out.field = positive_part(out.field);
    return out;
}

Functional build_functional(const FunctionalSpec& spec, std::size_t n_space) {
    if (spec.kind == "constant") return Functional::constant(n_space, spec.offset);
    Field dir = sine_series(spec.direction, n_space);
    if (spec.kind == "exp_neg_pair") return Functional::exp_neg_pair(std::move(dir), spec.a, spec.offset);
    if (spec.kind == "clipped_affine") return Functional::clipped_affine(std::move(dir), spec.offset, spec.lo, spec.hi);
    if (spec.kind == "bounded_cylinder")
        return Functional::bounded_cylinder(std::move(dir), spec.threshold, spec.lo, spec.hi);
    throw InvalidArgument("unknown functional kind '" + spec.kind + "'");
}

}  // namespace rspde::cli
