#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "rspde/cli/commands.hpp"
#include "rspde/cli/config.hpp"
#include "rspde/cli/output.hpp"
#include "rspde/heat.hpp"

namespace rspde::cli {
namespace {

namespace fs = std::filesystem;

std::string config_path(const std::string& name) { return std::string(RSPDE_SOURCE_DIR) + "/configs/" + name; }

fs::path scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("rspde_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

TEST(Config, RoundTripIsIdentity) {
    for (const char* name : {"heat_only.yaml", "standard_gradient.yaml", "log_harnack.yaml", "converge_eps.yaml"}) {
        const auto config = load_config(config_path(name));
        const std::string text = serialize_config(config);
        const auto again = parse_config(text);
        EXPECT_EQ(again, config) << name;
        EXPECT_EQ(serialize_config(again), text) << name;
        EXPECT_EQ(config_hash(again), config_hash(config)) << name;
    }
}

TEST(Config, HashIgnoresFormattingButNotValues) {
    const auto a = parse_config("grid:\n  n_space: 31\n  dt: 0.001\n");
    const auto b = parse_config("# comment\ngrid: {dt: 1.0e-3, n_space: 31}\n");
    EXPECT_EQ(config_hash(a), config_hash(b));
    const auto c = parse_config("grid:\n  n_space: 33\n  dt: 0.001\n");
    EXPECT_NE(config_hash(a), config_hash(c));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, DiagnosticsCarryLineAndField) {
    try {
        parse_config("grid:\n  n_space: 63\n  dtt: 0.1\n");
        FAIL() << "unknown key accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_NE(e.field().find("dtt"), std::string::npos);
    }
    try {
        parse_config("grid:\n  n_space: 2\n");
        FAIL() << "n_space = 2 accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.field(), "grid.n_space");
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_THROW(parse_config("run:\n  mode: sideways\n"), ConfigError);
}

TEST(Config, InitialFieldIsClipped) {
    const auto f = initial_field({0.0, 1.0}, 31);
    EXPECT_TRUE(is_nonnegative(f.field));
    EXPECT_GT(f.clip_distance, 0.0);
    EXPECT_EQ(initial_field({0.5}, 31).clip_distance, 0.0);
}

TEST(Output, FormatDouble) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(-0.0), "0");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
}

TEST(Output, BinaryRoundTrip) {
    const auto grid = make_grid(15, 1e-2, 0.1);
    const auto traj = solve_path(sine_series({0.3}, 15), Reflected{}, standard_model(), grid, NoisePlan{4, 2},
                                 {0.0, 0.05, 0.1});
    const Provenance prov{"0123456789abcdef", 4, 2, "reflected", "sin_modulated"};
    const auto back = read_trajectory_binary(trajectory_binary(traj, prov));
    EXPECT_EQ(back.seed, 4u);
    EXPECT_EQ(back.stream, 2u);
    EXPECT_EQ(back.config_hash, prov.config_hash);
    EXPECT_EQ(back.dx, grid.dx);
    ASSERT_EQ(back.times.size(), 3u);
    for (std::size_t s = 0; s < 3; ++s) {
        EXPECT_EQ(back.times[s], traj.snapshots[s].t);
        for (std::size_t i = 0; i < 15; ++i) EXPECT_EQ(back.values[s][i], traj.snapshots[s].u[i]);
    }
    auto bytes = trajectory_binary(traj, prov);
    bytes.resize(bytes.size() - 3);
    EXPECT_THROW(read_trajectory_binary(bytes), InvalidArgument);

    const std::string csv = trajectory_csv(traj, prov);
    EXPECT_EQ(csv.rfind("# ", 0), 0u);
    EXPECT_EQ(strip_comments(csv).rfind("t,x,u\n", 0), 0u);
}

TEST(Simulate, HeatOnlyMatchesHeatFlow) {
    const auto dir = scratch("heat");
    CommandOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream log;
    const auto config = load_config(config_path("heat_only.yaml"));
    EXPECT_EQ(cmd_simulate(config, opts, log), kPass);
    const auto bin = read_trajectory_binary([&] {
        const std::string s = read_file((dir / "path_0000.bin").string());
        return std::vector<std::uint8_t>(s.begin(), s.end());
    }());
    ASSERT_EQ(bin.times.size(), 3u);
    const Field h = sine_series({1.0}, 127);
    const Field exact = heat_apply(h, 0.1);
    Field final(127);
    for (std::size_t i = 0; i < 127; ++i) final[i] = bin.values.back()[i];
    EXPECT_LT(l2_norm(final - exact, 1.0 / 128.0), 1e-3);

    const auto manifest = nlohmann::json::parse(read_file((dir / "manifest.json").string()));
    EXPECT_EQ(manifest["config_hash"], config_hash(config));
    EXPECT_TRUE(fs::exists(dir / "path_0000.csv"));
    fs::remove_all(dir);
}

TEST(Check, ExitCodesFollowVerdict) {
    auto config = load_config(config_path("standard_gradient.yaml"));
    config.grid.t_final = 0.05;
    config.check.times = {0.05};
    config.run.n_paths = 100;
    const auto dir = scratch("check");
    CommandOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream log;
    EXPECT_EQ(cmd_check(config, "", opts, log), kPass);
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "summary.csv"));
    opts.m_scale = 1e-6;
    EXPECT_EQ(cmd_check(config, "", opts, log), kFail);
    fs::remove_all(dir);
}

TEST(Bounds, CsvRows) {
    const std::string csv = bounds_csv(1.0, 1.0, 1.1, {0.1, 0.25});
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    EXPECT_EQ(header, "t,M,zeta,int_exp_neg_zeta,harnack_rhs");
    std::getline(in, row);
    EXPECT_EQ(row.rfind("0.1,487.459", 0), 0u);
}

}  // namespace
}  // namespace rspde::cli
