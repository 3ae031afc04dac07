#include "dirspike/config.hpp"
#include "dirspike/errors.hpp"
#include "dirspike/io.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace dirspike;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::filesystem::path scratch = std::filesystem::path(DIRSPIKE_TEST_SCRATCH) / "config_io";

}  // namespace

TEST_CASE("typed values and defaults", "[config]") {
    Config cfg = Config::parse(R"(
# comment
[model]
tau = 0.05
beta3 = 5

[simulation]
mode = "full"
x0 = [0.0, -1.5e-1, 2]
record_stride = 10

[thresholds]
confirm = false
)");
    CHECK(cfg.number("model", "tau", 1.0) == 0.05);
    CHECK(cfg.number("model", "tau_s", 3.0) == 3.0);
    CHECK(cfg.number("model", "beta3", 0.0) == 5.0);
    CHECK(cfg.string("simulation", "mode", "reduced") == "full");
    CHECK(cfg.numbers("simulation", "x0", {}) == std::vector<double>{0.0, -0.15, 2.0});
    CHECK(cfg.integer("simulation", "record_stride", 1) == 10);
    CHECK_FALSE(cfg.boolean("thresholds", "confirm", true));
    CHECK(cfg.has("model", "tau"));
    CHECK_FALSE(cfg.has("model", "alpha"));

    const auto& eff = cfg.effective();
    REQUIRE(eff.size() == 7);
    CHECK(eff[0] == std::pair<std::string, std::string>{"model.tau", "0.050000000000000003"});
    CHECK(eff[1] == std::pair<std::string, std::string>{"model.tau_s", "3"});
    CHECK(eff[4].second == "[0, -0.14999999999999999, 2]");
}

TEST_CASE("unknown names and malformed values are rejected", "[config]") {
    CHECK_THROWS_AS(Config::parse("[modle]\ntau = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[model]\ntua = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[model]\ntau = fast\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[model]\ntau = 1\ntau = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("tau = 1\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[simulation]\nx0 = [1, 2,]\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[simulation]\nmode = full\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[simulation]\nrecord_stride = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[thresholds]\nconfirm = yes\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[model]\ntau = nan\n"), ConfigError);
    CHECK_THROWS_AS(Config::load(scratch / "does_not_exist.toml"), ConfigError);
}

TEST_CASE("empty sections and lists are accepted", "[config]") {
    Config cfg = Config::parse("[model]\n[phase_plane]\nu_tilde = []\n");
    CHECK(cfg.numbers("phase_plane", "u_tilde", {1.0}).empty());
}

TEST_CASE("numbers round-trip through their text form", "[io]") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_numbers({1.0, 2.5}) == "[1, 2.5]");
}

TEST_CASE("csv layout", "[io]") {
    const auto path = scratch / "t.csv";
    {
        CsvWriter csv(path, {{"model.tau", "0.1"}, {"detector.r_up", "0.8"}}, {"t", "r"});
        csv.row({0.0, 0.1});
        csv.row({0.5, 1.0 / 3.0});
        CHECK_THROWS(csv.row({1.0}));
        csv.close();
    }
    CHECK(slurp(path) == "# model.tau=0.1\n# detector.r_up=0.8\nt,r\n0,0.10000000000000001\n0.5,0.33333333333333331\n");
}

TEST_CASE("json documents lead with the configuration", "[io]") {
    const auto path = scratch / "t.json";
    write_json(path, {{"model.tau", "0.1"}}, Json{{"value", 2.5}, {"list", {1, 2}}});
    const auto doc = Json::parse(slurp(path));
    CHECK(doc.begin().key() == "config");
    CHECK(doc["config"]["model.tau"] == "0.1");
    CHECK(doc["value"] == 2.5);

    const auto lines = scratch / "t.jsonl";
    write_json_lines(lines, {{"a", "1"}}, {Json{{"x", 1}}, Json{{"x", 2}}});
    CHECK(slurp(lines) == "{\"config\":{\"a\":\"1\"}}\n{\"x\":1}\n{\"x\":2}\n");
}
