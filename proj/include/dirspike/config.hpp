#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dirspike {

/// Sectioned `key = value` configuration. Values are numbers, booleans,
/// double-quoted strings or bracketed number lists:
///
///   [simulation]
///   x0 = [0.0, 0.0]
///   [input]
///   kind = "rotating"
///
/// Every section and key is checked against a fixed schema at load time;
/// unknown names and malformed values raise ConfigError. Typed getters return
/// the configured value or the supplied default and record what they return,
/// so `effective()` lists the complete configuration a command actually used.
class Config {
public:
    Config() = default;

    /// Throws ConfigError when the file cannot be read or fails validation.
    [[nodiscard]] static Config load(const std::filesystem::path& path);
    [[nodiscard]] static Config parse(const std::string& text, const std::string& origin = "<string>");

    [[nodiscard]] bool has(const std::string& section, const std::string& key) const;

    double number(const std::string& section, const std::string& key, double fallback);
    long integer(const std::string& section, const std::string& key, long fallback);
    bool boolean(const std::string& section, const std::string& key, bool fallback);
    std::string string(const std::string& section, const std::string& key, const std::string& fallback);
    std::vector<double> numbers(const std::string& section, const std::string& key, const std::vector<double>& fallback);

    /// Records a derived or command-line value alongside the file values.
    void note(const std::string& section, const std::string& key, const std::string& value);

    /// "section.key" = formatted value, in first-access order.
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& effective() const noexcept {
        return effective_;
    }

private:
    const std::string* raw(const std::string& section, const std::string& key) const;
    void record(const std::string& section, const std::string& key, std::string value);

    std::string origin_;
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::vector<std::pair<std::string, std::string>> effective_;
};

/// 17 significant digits ("%.17g"), enough to read back the same double.
[[nodiscard]] std::string format_number(double v);
[[nodiscard]] std::string format_numbers(const std::vector<double>& v);

}  // namespace dirspike
