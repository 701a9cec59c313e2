#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rcm/lattice.hpp"

namespace rcm::harness {

// Flat "key = value" configuration. Lines starting with # are comments; values
// may be quoted strings or bracketed comma-separated lists. Unknown keys are errors.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;
    Site get_site(const std::string& key, Site fallback) const;

    // canonical sorted "key=value" lines; the hash is FNV-1a 64 of this text
    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;
    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_;
};

const std::vector<std::string>& known_keys();

}  // namespace rcm::harness
