#include "coactiv/kv_config.hpp"

#include <fstream>
#include <sstream>

#include "coactiv/errors.hpp"

namespace coactiv {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::parse_text(const std::string& text) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error("config line " + std::to_string(lineno) + ": empty key");
        if (cfg.has(key))
            throw Error("config line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
        cfg.entries_.emplace_back(std::move(key), std::move(value));
    }
    return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

bool KvConfig::has(const std::string& key) const {
    return get(key).has_value();
}

std::optional<std::string> KvConfig::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return std::nullopt;
}

std::string KvConfig::get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

std::string KvConfig::required(const std::string& key) const {
    auto v = get(key);
    if (!v) throw Error("missing required config key '" + key + "'");
    return *v;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        double d = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return d;
    } catch (const std::exception&) {
        throw Error("config key '" + key + "' is not a number: " + *v);
    }
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        std::int64_t i = std::stoll(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return i;
    } catch (const std::exception&) {
        throw Error("config key '" + key + "' is not an integer: " + *v);
    }
}

std::string KvConfig::to_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    return out.str();
}

}  // namespace coactiv
