#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rspde/solver.hpp"

namespace rspde::cli {

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Provenance written into every output file.
struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string mode;
    std::string model;
};

/// CSV with '#' provenance lines, then the header t,x,u and one row per
/// (snapshot, interior node), snapshots in time order, nodes left to right.
std::string trajectory_csv(const Trajectory& traj, const Provenance& prov);

/// Little-endian column file, layout in docs/formats.md.
std::vector<std::uint8_t> trajectory_binary(const Trajectory& traj, const Provenance& prov);

struct BinaryTrajectory {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string config_hash;
    double dx = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  ///< one row per snapshot
};
/// Inverse of trajectory_binary; throws InvalidArgument on malformed input.
BinaryTrajectory read_trajectory_binary(const std::vector<std::uint8_t>& bytes);

/// CSV body with '#' comment lines removed.
std::string strip_comments(const std::string& csv);

void write_file(const std::string& path, std::string_view content);
void write_file(const std::string& path, const std::vector<std::uint8_t>& content);
std::string read_file(const std::string& path);

}  // namespace rspde::cli
