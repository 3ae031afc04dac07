#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dirspike {

using Json = nlohmann::ordered_json;
using Preamble = std::vector<std::pair<std::string, std::string>>;

/// CSV with a `# key=value` preamble followed by one column-name line.
/// Numbers are written with 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const Preamble& preamble, const std::vector<std::string>& columns);

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

    /// Flushes and throws std::runtime_error if any write failed.
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
    std::string line_;
};

/// Wraps `body` as {"config": {...preamble...}, ...body} and writes it with a
/// trailing newline.
void write_json(const std::filesystem::path& path, const Preamble& preamble, const Json& body);

/// JSON-lines file whose first record is {"config": {...}}.
void write_json_lines(const std::filesystem::path& path, const Preamble& preamble, const std::vector<Json>& records);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace dirspike
