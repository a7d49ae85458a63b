#pragma once

#include <map>
#include <string>
#include <vector>

#include "chiralab/errors.hpp"
#include "chiralab/vec.hpp"

namespace chiralab {

/// Flat `key = value` configuration with dotted section prefixes.
/// Lines starting with '#' are comments; duplicate keys are rejected.
class Config {
  public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::vector<long long> get_int_list(const std::string& key) const;  // comma separated
    Vec3 get_vec3(const std::string& key) const;                        // three components
    std::vector<Vec3> get_vec3_list(const std::string& key) const;      // '|' separated

    /// Keys that were never read; used to reject unknown keys.
    std::vector<std::string> unused_keys() const;

  private:
    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, bool> used_;
};

}  // namespace chiralab
