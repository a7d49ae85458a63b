#include "chiralab/config.hpp"

#include <fstream>
#include <sstream>

namespace chiralab {

namespace {
std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno);
        if (c.kv_.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
        c.kv_[key] = value;
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key '" + key + "'");
    used_[key] = true;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return get_string(key);
}

double Config::get_double(const std::string& key) const {
    std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + v);
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return get_double(key);
}

long long Config::get_int(const std::string& key) const {
    std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an integer: " + v);
    }
}

long long Config::get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    return get_int(key);
}

std::vector<long long> Config::get_int_list(const std::string& key) const {
    std::string v = get_string(key);
    std::vector<long long> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad integer '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' has no entries");
    return out;
}

Vec3 Config::get_vec3(const std::string& key) const {
    std::string v = get_string(key);
    std::istringstream is(v);
    Vec3 out;
    if (!(is >> out.x >> out.y >> out.z))
        throw ConfigError("config key '" + key + "' needs three components");
    std::string extra;
    if (is >> extra) throw ConfigError("config key '" + key + "' has trailing content");
    return out;
}

std::vector<Vec3> Config::get_vec3_list(const std::string& key) const {
    std::string v = get_string(key);
    std::vector<Vec3> out;
    std::istringstream is(v);
    std::string part;
    while (std::getline(is, part, '|')) {
        std::istringstream ps(part);
        Vec3 q;
        if (!(ps >> q.x >> q.y >> q.z))
            throw ConfigError("config key '" + key + "': each axis needs three components");
        out.push_back(q);
    }
    if (out.empty()) throw ConfigError("config key '" + key + "' has no axes");
    return out;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

}  // namespace chiralab
