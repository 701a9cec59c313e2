#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rcm/environment.hpp"
#include "rcm/harness/config.hpp"

namespace rcm::harness {

inline constexpr const char* kVersion = "0.1.0";

struct Table {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentResult {
    std::string id;
    std::vector<Table> tables;
    nlohmann::json estimates = nlohmann::json::object();
    std::vector<Check> checks;
    double wall_seconds = 0.0;

    bool passed() const;
    const Table& table(const std::string& name) const;
    const Check* check(const std::string& name) const;
};

// Shortest text that round-trips the double exactly.
std::string fmt(double v);
std::string fmt(long long v);
inline std::string fmt(int v) { return fmt(static_cast<long long>(v)); }

struct RunMeta {
    std::string experiment;
    std::string config_hash;
    std::uint64_t master_seed = 0;
    int threads = 1;
};

// CSV with a leading "# rcm-lab ..." metadata comment line, then the header.
void write_csv(const std::string& dir, const Table& table, const RunMeta& meta);
nlohmann::json manifest(const ExperimentResult& result, const Config& cfg, const RunMeta& meta, bool with_tables);
void write_json(const std::string& path, const nlohmann::json& j);

// Binary snapshot: "RCM2ENV\0", u32 version, u32 L, then per site in row-major
// order (y outer) the east and north conductances as little-endian doubles.
void write_snapshot(const std::string& path, const StaticEnvironment& env);
StaticEnvironment read_snapshot(const std::string& path);

}  // namespace rcm::harness
