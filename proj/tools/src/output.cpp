#include "rspde/cli/output.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rspde/errors.hpp"

namespace rspde::cli {

namespace {

constexpr std::array<char, 8> kMagic{'R', 'S', 'P', 'D', 'E', 'T', 'R', 'J'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "binary trajectory writer assumes little-endian");

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
    std::array<std::uint8_t, sizeof(T)> raw;
    std::memcpy(raw.data(), &value, sizeof(T));
    out.insert(out.end(), raw.begin(), raw.end());
}

template <class T>
T take(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw InvalidArgument("binary trajectory truncated");
    T value;
    std::memcpy(&value, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
}

}  // namespace

std::string format_double(double v) {
    if (v == 0.0) return "0";  // also folds -0
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    return out;
}

std::string trajectory_csv(const Trajectory& traj, const Provenance& prov) {
    std::ostringstream os;
    os << "# rspde trajectory\n"
       << "# config_hash=" << prov.config_hash << "\n"
       << "# seed=" << prov.seed << "\n"
       << "# stream=" << prov.stream << "\n"
       << "# mode=" << prov.mode << "\n"
       << "# model=" << prov.model << "\n"
       << "t,x,u\n";
    const auto& grid = traj.meta.grid;
    for (const auto& s : traj.snapshots) {
        const std::string t = format_double(s.t);
        for (std::size_t i = 0; i < s.u.size(); ++i)
            os << t << ',' << format_double(grid.x(i)) << ',' << format_double(s.u[i]) << '\n';
    }
    return os.str();
}

std::vector<std::uint8_t> trajectory_binary(const Trajectory& traj, const Provenance& prov) {
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    const auto& grid = traj.meta.grid;
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.n_space));
    put<std::uint64_t>(out, traj.snapshots.size());
    put<std::uint64_t>(out, prov.seed);
    put<std::uint64_t>(out, prov.stream);
    put<double>(out, grid.dx);
    std::array<char, 16> hash{};
    std::memcpy(hash.data(), prov.config_hash.data(), std::min<std::size_t>(16, prov.config_hash.size()));
    out.insert(out.end(), hash.begin(), hash.end());
    for (const auto& s : traj.snapshots) put<double>(out, s.t);
    for (const auto& s : traj.snapshots)
        for (double v : s.u) put<double>(out, v);
    return out;
}

BinaryTrajectory read_trajectory_binary(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw InvalidArgument("not an rspde binary trajectory");
    std::size_t pos = kMagic.size();
    if (take<std::uint32_t>(bytes, pos) != kVersion) throw InvalidArgument("unsupported binary trajectory version");
    BinaryTrajectory out;
    const auto n_space = take<std::uint32_t>(bytes, pos);
    const auto n_snap = take<std::uint64_t>(bytes, pos);
    out.seed = take<std::uint64_t>(bytes, pos);
    out.stream = take<std::uint64_t>(bytes, pos);
    out.dx = take<double>(bytes, pos);
    if (pos + 16 > bytes.size()) throw InvalidArgument("binary trajectory truncated");
    out.config_hash.assign(reinterpret_cast<const char*>(bytes.data() + pos), 16);
    pos += 16;
    out.times.resize(n_snap);
    for (auto& t : out.times) t = take<double>(bytes, pos);
    out.values.assign(n_snap, std::vector<double>(n_space));
    for (auto& row : out.values)
        for (auto& v : row) v = take<double>(bytes, pos);
    if (pos != bytes.size()) throw InvalidArgument("binary trajectory has trailing bytes");
    return out;
}

std::string strip_comments(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line.front() != '#') out += line + '\n';
    return out;
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& content) {
    write_file(path, std::string_view(reinterpret_cast<const char*>(content.data()), content.size()));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace rspde::cli
