#include "rcm/harness/output.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rcm/errors.hpp"

namespace rcm::harness {

bool ExperimentResult::passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const Table& ExperimentResult::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw std::out_of_range("no table named " + name);
}

const Check* ExperimentResult::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, p);
}

std::string fmt(long long v) { return std::to_string(v); }

void write_csv(const std::string& dir, const Table& table, const RunMeta& meta) {
    std::filesystem::create_directories(dir);
    std::string path = (std::filesystem::path(dir) / (table.name + ".csv")).string();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "# rcm-lab " << kVersion << " experiment=" << meta.experiment << " config_hash=" << meta.config_hash
        << " master_seed=" << meta.master_seed << " threads=" << meta.threads << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

nlohmann::json manifest(const ExperimentResult& r, const Config& cfg, const RunMeta& meta, bool with_tables) {
    nlohmann::json j;
    j["tool"] = "rcm-lab";
    j["version"] = kVersion;
    j["experiment"] = r.id;
    j["config_hash"] = meta.config_hash;
    j["master_seed"] = meta.master_seed;
    j["threads"] = meta.threads;
    j["config"] = cfg.entries();
    j["wall_seconds"] = r.wall_seconds;
    j["estimates"] = r.estimates;
    j["passed"] = r.passed();
    auto checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    auto files = nlohmann::json::array();
    for (const auto& t : r.tables) {
        if (with_tables) {
            nlohmann::json tj;
            tj["name"] = t.name;
            tj["header"] = t.header;
            tj["rows"] = t.rows;
            files.push_back(tj);
        } else {
            files.push_back(t.name + ".csv");
        }
    }
    j[with_tables ? "tables" : "files"] = files;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

namespace {

constexpr char kMagic[8] = {'R', 'C', 'M', '2', 'E', 'N', 'V', '\0'};

template <class T>
void put_le(std::ostream& out, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& in, const std::string& path) {
    unsigned char b[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw ConfigError("truncated snapshot '" + path + "'");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const StaticEnvironment& env) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write snapshot '" + path + "'");
    out.write(kMagic, 8);
    put_le<std::uint32_t>(out, 1);
    put_le<std::uint32_t>(out, std::uint32_t(env.window().L));
    for (std::size_t i = 0; i < env.window().num_sites(); ++i) {
        put_le<double>(out, env.east()[i]);
        put_le<double>(out, env.north()[i]);
    }
}

StaticEnvironment read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read snapshot '" + path + "'");
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ConfigError("'" + path + "' is not an environment snapshot");
    auto version = get_le<std::uint32_t>(in, path);
    if (version != 1) throw ConfigError("unsupported snapshot version " + std::to_string(version));
    auto L = int(get_le<std::uint32_t>(in, path));
    StaticEnvironment env(Window{L});
    const Window w = env.window();
    for (std::size_t i = 0; i < w.num_sites(); ++i) {
        double e = get_le<double>(in, path), n = get_le<double>(in, path);
        Site s = w.site(i);
        if (s.x < L) env.set_omega(s, 0, e);
        else if (e != 0.0) throw ConfigError("snapshot has an edge leaving the window");
        if (s.y < L) env.set_omega(s, 2, n);
        else if (n != 0.0) throw ConfigError("snapshot has an edge leaving the window");
    }
    return env;
}

}  // namespace rcm::harness
