#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "rsmrac/config.hpp"

using namespace rsm;
using nlohmann::json;

namespace {

std::string tmp_file(const std::string& text) {
    static int n = 0;
    std::string path = "rsmrac_cfg_test_" + std::to_string(n++) + ".json";
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    std::string p = tmp_file("");
    ScenarioConfig c = load_config(p);
    CHECK(config_to_json(c) == config_to_json(ScenarioConfig{}));
    CHECK(config_fingerprint(c) == config_fingerprint(ScenarioConfig{}));
    std::remove(p.c_str());
}

TEST_CASE("validation names the key") {
    CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"barrier": {"radius": -1}})")),
                         "barrier.radius must be positive", ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"plant": {"drag": "x"}})")),
                         "plant.drag must be a number", ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"policy": {"gaol": [1,2,3]}})")),
                         "policy.gaol is not a known key", ConfigError);
    CHECK_THROWS_WITH_AS(config_from_json(json::parse(R"({"initial": {"position": [5,5,2.5]}})")),
                         "initial.position must lie outside the obstacle", ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
    std::string p = tmp_file("{ not json");
    CHECK_THROWS_AS(load_config(p), ConfigError);
    std::remove(p.c_str());
}

TEST_CASE("round trip") {
    json j = json::parse(R"({
        "seed": 42,
        "plant": {"mismatch_scale": 1.1, "lambda": [0.7, 0.9, 1.2], "mismatch_mode": "full"},
        "budget": {"theta_x_bar": "auto", "L1": 3.5, "vmax": "auto"},
        "filter": {"kind": "reference_qp", "gamma": 4},
        "expect": {"robust_socp": "safe", "plant_qp": "safe"}
    })");
    ScenarioConfig a = config_from_json(j);
    CHECK(a.seed == 42);
    CHECK(!a.theta_x_bar);
    CHECK(*a.L1 == 3.5);
    CHECK(a.filter == FilterKind::ReferenceQP);
    CHECK(a.expect_safe.at("plant_qp"));
    json dumped = config_to_json(a);
    ScenarioConfig b = config_from_json(dumped);
    CHECK(config_to_json(b) == dumped);
    CHECK(config_fingerprint(a) == config_fingerprint(b));
    CHECK(config_fingerprint(a) != config_fingerprint(ScenarioConfig{}));
}
