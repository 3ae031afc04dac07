#include "dirspike/config.hpp"

#include "dirspike/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dirspike {

namespace {

enum class Kind { Number, Integer, Boolean, String, NumberList };

using Schema = std::map<std::string, std::map<std::string, Kind>>;

const Schema& schema() {
    static const Schema s = [] {
        const std::map<std::string, Kind> model{{"tau", Kind::Number},   {"tau_s", Kind::Number},
                                                {"alpha", Kind::Number}, {"beta1", Kind::Number},
                                                {"beta2", Kind::Number}, {"beta3", Kind::Number}};
        return Schema{
            {"model", model},
            {"controller", model},
            {"simulation",
             {{"mode", Kind::String},
              {"dt", Kind::Number},
              {"t_end", Kind::Number},
              {"x0", Kind::NumberList},
              {"x_s0", Kind::Number},
              {"r0", Kind::Number},
              {"record_stride", Kind::Integer}}},
            {"input",
             {{"kind", Kind::String}, {"u", Kind::NumberList}, {"u_tilde", Kind::Number}, {"omega", Kind::Number}}},
            {"detector", {{"r_up", Kind::Number}, {"r_down", Kind::Number}, {"steady_fraction", Kind::Number}}},
            {"phase_plane",
             {{"u_tilde", Kind::NumberList},
              {"r_max", Kind::Number},
              {"r_points", Kind::Integer},
              {"xs_max", Kind::Number},
              {"field_r_points", Kind::Integer},
              {"field_xs_points", Kind::Integer},
              {"t_end", Kind::Number}}},
            {"fi",
             {{"u_min", Kind::Number},
              {"u_max", Kind::Number},
              {"points", Kind::Integer},
              {"t_end", Kind::Number},
              {"dt", Kind::Number}}},
            {"thresholds",
             {{"u_min", Kind::Number},
              {"u_max", Kind::Number},
              {"tol", Kind::Number},
              {"scan_points", Kind::Integer},
              {"confirm", Kind::Boolean},
              {"t_end", Kind::Number}}},
            {"plant", {{"gamma", Kind::Number}, {"alpha_act", Kind::Number}, {"S", Kind::Number}}},
            {"task",
             {{"k1", Kind::Number},
              {"k2", Kind::Number},
              {"eps", Kind::Number},
              {"t_end", Kind::Number},
              {"dt", Kind::Number},
              {"record_dt", Kind::Number},
              {"duty_start", Kind::Number},
              {"transient", Kind::Number},
              {"ref_radius0", Kind::Number},
              {"ref_radius_rate", Kind::Number},
              {"ref_omega", Kind::Number},
              {"ref_phase", Kind::Number}}},
            {"obstacles",
             {{"reference_times", Kind::NumberList}, {"x", Kind::NumberList}, {"y", Kind::NumberList}}},
        };
    }();
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(t.c_str(), &end);
    return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_integer(const std::string& text, long& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtol(t.c_str(), &end, 10);
    return errno == 0 && end == t.c_str() + t.size();
}

bool parse_list(const std::string& text, std::vector<double>& out) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']') return false;
    out.clear();
    const std::string body = trim(t.substr(1, t.size() - 2));
    if (body.empty()) return true;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!parse_number(item, v)) return false;
        out.push_back(v);
    }
    return body.back() != ',';
}

bool parse_string(const std::string& text, std::string& out) {
    const std::string t = trim(text);
    if (t.size() < 2 || t.front() != '"' || t.back() != '"') return false;
    out = t.substr(1, t.size() - 2);
    return out.find('"') == std::string::npos;
}

bool parse_bool(const std::string& text, bool& out) {
    const std::string t = trim(text);
    if (t == "true") out = true;
    else if (t == "false") out = false;
    else return false;
    return true;
}

bool well_formed(Kind kind, const std::string& text) {
    double d;
    long l;
    bool b;
    std::string s;
    std::vector<double> v;
    switch (kind) {
        case Kind::Number: return parse_number(text, d);
        case Kind::Integer: return parse_integer(text, l);
        case Kind::Boolean: return parse_bool(text, b);
        case Kind::String: return parse_string(text, s);
        case Kind::NumberList: return parse_list(text, v);
    }
    return false;
}

std::string_view kind_name(Kind kind) {
    switch (kind) {
        case Kind::Number: return "a number";
        case Kind::Integer: return "an integer";
        case Kind::Boolean: return "true or false";
        case Kind::String: return "a quoted string";
        case Kind::NumberList: return "a list of numbers";
    }
    return "";
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    Config cfg;
    cfg.origin_ = origin;
    for (const auto& [section, body] : tree) {
        if (!body.data().empty()) throw ConfigError(origin + ": key '" + section + "' outside of any section");
        const auto sec = schema().find(section);
        if (sec == schema().end()) throw ConfigError(origin + ": unknown section [" + section + "]");
        for (const auto& [key, node] : body) {
            const auto k = sec->second.find(key);
            if (k == sec->second.end()) throw ConfigError(origin + ": unknown key '" + key + "' in [" + section + "]");
            const std::string value = node.data();
            if (!well_formed(k->second, value)) {
                throw ConfigError(origin + ": " + section + "." + key + " must be " + std::string(kind_name(k->second)) +
                                  ", got '" + value + "'");
            }
            cfg.values_[section][key] = value;
        }
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

bool Config::has(const std::string& section, const std::string& key) const { return raw(section, key) != nullptr; }

const std::string* Config::raw(const std::string& section, const std::string& key) const {
    const auto& sec = schema().at(section);
    if (!sec.contains(key)) throw std::logic_error("config key not in schema: " + section + "." + key);
    const auto s = values_.find(section);
    if (s == values_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

void Config::record(const std::string& section, const std::string& key, std::string value) {
    const std::string name = section + "." + key;
    for (auto& [n, v] : effective_) {
        if (n == name) {
            v = std::move(value);
            return;
        }
    }
    effective_.emplace_back(name, std::move(value));
}

void Config::note(const std::string& section, const std::string& key, const std::string& value) {
    record(section, key, value);
}

double Config::number(const std::string& section, const std::string& key, double fallback) {
    double v = fallback;
    if (const auto* r = raw(section, key)) parse_number(*r, v);
    record(section, key, format_number(v));
    return v;
}

long Config::integer(const std::string& section, const std::string& key, long fallback) {
    long v = fallback;
    if (const auto* r = raw(section, key)) parse_integer(*r, v);
    record(section, key, std::to_string(v));
    return v;
}

bool Config::boolean(const std::string& section, const std::string& key, bool fallback) {
    bool v = fallback;
    if (const auto* r = raw(section, key)) parse_bool(*r, v);
    record(section, key, v ? "true" : "false");
    return v;
}

std::string Config::string(const std::string& section, const std::string& key, const std::string& fallback) {
    std::string v = fallback;
    if (const auto* r = raw(section, key)) parse_string(*r, v);
    record(section, key, v);
    return v;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) {
    std::vector<double> v = fallback;
    if (const auto* r = raw(section, key)) parse_list(*r, v);
    record(section, key, format_numbers(v));
    return v;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_numbers(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_number(v[i]);
    }
    return out + "]";
}

}  // namespace dirspike
