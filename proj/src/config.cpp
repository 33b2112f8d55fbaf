#include "agelab/config.hpp"

#include "agelab/twopoint.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace agelab {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> split_assignment(std::string_view line, std::string_view where)
{
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(where) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(std::string(where) + ": empty key");
    for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            throw ConfigError(std::string(where) + ": bad key '" + std::string(key) + "'");
    return {std::string(key), std::string(trim(line.substr(eq + 1)))};
}

}  // namespace

Config Config::parse(std::istream& is, std::string_view source)
{
    Config c;
    std::string line;
    for (int n = 1; std::getline(is, line); ++n) {
        std::string_view v = line;
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = trim(v);
        if (v.empty()) continue;
        const std::string where = std::string(source) + ":" + std::to_string(n);
        auto [key, value] = split_assignment(v, where);
        if (c.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        c.values_[key] = value;
    }
    return c;
}

Config Config::parse_string(std::string_view text)
{
    std::istringstream is{std::string(text)};
    return parse(is);
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    return parse(is, path.string());
}

void Config::apply_override(std::string_view assignment)
{
    auto [key, value] = split_assignment(trim(assignment), "override '" + std::string(assignment) + "'");
    values_[key] = value;
}

const std::string& Config::get(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
}

void Config::write(std::ostream& os) const
{
    for (const auto& [k, v] : values_) os << k << '=' << v << '\n';
}

double parse_real(std::string_view key, std::string_view text)
{
    text = trim(text);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(std::string(key) + ": '" + std::string(text) + "' is not a real number");
    return v;
}

long long parse_integer(std::string_view key, std::string_view text)
{
    text = trim(text);
    // accept 1e5-style literals when they are exact integers
    const double d = parse_real(key, text);
    if (d != std::floor(d) || std::abs(d) > 9.0e15)
        throw ConfigError(std::string(key) + ": '" + std::string(text) + "' is not an integer");
    return static_cast<long long>(d);
}

std::vector<double> parse_real_list(std::string_view key, std::string_view text)
{
    text = trim(text);
    if (text.starts_with("log:")) {
        std::vector<std::string_view> parts;
        std::string_view rest = text.substr(4);
        for (std::size_t pos; (pos = rest.find(':')) != std::string_view::npos; rest = rest.substr(pos + 1))
            parts.push_back(rest.substr(0, pos));
        parts.push_back(rest);
        if (parts.size() != 3) throw ConfigError(std::string(key) + ": expected log:lo:hi:n");
        const double lo = parse_real(key, parts[0]), hi = parse_real(key, parts[1]);
        const long long n = parse_integer(key, parts[2]);
        if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError(std::string(key) + ": need 0 < lo < hi and n >= 2");
        return log_grid(lo, hi, static_cast<std::size_t>(n));
    }
    std::vector<double> out;
    if (text.empty()) return out;
    std::string_view rest = text;
    for (;;) {
        const auto pos = rest.find(',');
        out.push_back(parse_real(key, rest.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        rest = rest.substr(pos + 1);
    }
    return out;
}

}  // namespace agelab
