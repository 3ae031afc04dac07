#include "dirspike/io.hpp"

#include "dirspike/config.hpp"

#include <stdexcept>

namespace dirspike {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Json config_object(const Preamble& preamble) {
    Json cfg = Json::object();
    for (const auto& [k, v] : preamble) cfg[k] = v;
    return cfg;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const Preamble& preamble,
                     const std::vector<std::string>& columns)
    : path_(path), out_(open_output(path)), columns_(columns.size()) {
    for (const auto& [k, v] : preamble) out_ << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != columns_) throw std::logic_error("csv row width does not match the header");
    line_.clear();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line_ += ',';
        line_ += format_number(values[i]);
    }
    line_ += '\n';
    out_ << line_;
}

void CsvWriter::close() { finish(out_, path_); }

void write_json(const std::filesystem::path& path, const Preamble& preamble, const Json& body) {
    Json doc = Json::object();
    doc["config"] = config_object(preamble);
    for (const auto& [k, v] : body.items()) doc[k] = v;
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

void write_json_lines(const std::filesystem::path& path, const Preamble& preamble, const std::vector<Json>& records) {
    auto out = open_output(path);
    out << Json{{"config", config_object(preamble)}}.dump() << '\n';
    for (const auto& r : records) out << r.dump() << '\n';
    finish(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text;
    finish(out, path);
}

}  // namespace dirspike
