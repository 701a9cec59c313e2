#include "rcm/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rcm/errors.hpp"

namespace rcm::harness {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) return v.substr(1, v.size() - 2);
    return v;
}

std::vector<std::string> split_list(std::string v) {
    v = trim(v);
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError("unterminated list '" + v + "'");
        v = v.substr(1, v.size() - 2);
    }
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = unquote(trim(item));
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
    return v;
}

}  // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "experiment", "master_seed", "num_env",
        // static law
        "law", "p_open", "c", "lo", "hi", "shape", "scale", "speed",
        // geometry and solver
        "window_L", "ball_shape", "solver", "solver_tol", "n_grid", "k1", "k2", "mesh_radii", "mesh_angles",
        "nref_factor", "delta", "x", "y", "A_radius", "n_outer", "n_ref", "r_grid", "slope_n_min",
        // constants
        "gbar", "gbar_err", "sigma_T", "sigma_env", "sigma_walk", "sigma_L", "theta_L", "theta_seeds",
        // heat kernel
        "t_grid", "heat_tol", "heat_leak", "T_cut", "num_walk",
        // thresholds
        "threshold_final_cap", "threshold_ratio", "threshold_offcenter", "threshold_slope", "threshold_lemma",
        "threshold_stability",
        // dynamic
        "dyn_delta", "dyn_env", "dyn_times", "dyn_crop", "slope_band",
        // interface
        "kappa", "eps", "ux", "uy", "torus_L", "h", "burn_in", "samples", "sample_time", "thin", "var_dir", "batches",
        // io
        "out", "format", "snapshot",
    };
    return keys;
}

Config Config::parse(const std::string& text, const std::string& origin) {
    static const std::set<std::string> allowed(known_keys().begin(), known_keys().end());
    Config cfg;
    cfg.origin_ = origin;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            // keep '#' inside quotes
            bool quoted = false;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') quoted = !quoted;
                if (line[i] == '#' && !quoted) {
                    line = line.substr(0, i);
                    break;
                }
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = unquote(trim(line.substr(eq + 1)));
        if (!allowed.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (cfg.values_.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'");
    values_[key] = value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_number<double>(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_number<int>(key, it->second);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_number<std::uint64_t>(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "': expected true or false");
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<int> out;
    for (const auto& s : split_list(it->second)) out.push_back(parse_number<int>(key, s));
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& s : split_list(it->second)) out.push_back(parse_number<double>(key, s));
    return out;
}

Site Config::get_site(const std::string& key, Site fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto parts = split_list(it->second);
    if (parts.size() != 2) throw ConfigError("key '" + key + "': expected a site 'x, y'");
    return {parse_number<int>(key, parts[0]), parse_number<int>(key, parts[1])};
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string Config::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

}  // namespace rcm::harness
