#pragma once

#include <optional>
#include <string>
#include <vector>

namespace coactiv {

// Line-oriented "key = value" configuration. '#' starts a comment; keys
// are unique; surrounding whitespace is trimmed.
class KvConfig {
public:
    static KvConfig parse_text(const std::string& text);
    static KvConfig parse_file(const std::string& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::string required(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    // Canonical "key = value" text of all entries, in file order.
    std::string to_text() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace coactiv
