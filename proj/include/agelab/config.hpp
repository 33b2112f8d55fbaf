#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agelab {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat `key = value` configuration. '#' starts a comment; blank lines are
/// ignored; a key may appear once per file. Overrides replace values.
class Config {
public:
    static Config parse(std::istream& is, std::string_view source = "<config>");
    static Config parse_string(std::string_view text);
    static Config load(const std::filesystem::path& path);

    /// "key=value"
    void apply_override(std::string_view assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void erase(const std::string& key) { values_.erase(key); }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const noexcept { return values_; }

    /// Keys in sorted order, one `key=value` per line.
    void write(std::ostream& os) const;

private:
    std::map<std::string, std::string> values_;
};

/// Value parsers used by the schemas. All throw ConfigError with the key name.
double parse_real(std::string_view key, std::string_view text);
long long parse_integer(std::string_view key, std::string_view text);
/// Comma-separated reals, or "log:lo:hi:n" for n log-spaced points.
std::vector<double> parse_real_list(std::string_view key, std::string_view text);

}  // namespace agelab
