#include <doctest.h>

#include "qhc/config.hpp"

#include <string>

using namespace qhc;

TEST_CASE("minimal document materializes all defaults") {
    auto c = config::parse_config(R"({"B":1, "L":8, "V0":0.2, "epsilon":0.05})");
    CHECK(c.model.B == 1.0);
    CHECK(c.model.L == 8.0);
    CHECK(c.basis.resolution == 8);
    CHECK(c.solver.tol == 1e-9);
    CHECK(c.experiment.seeds == 50);
    CHECK(c.out_dir == "runs");
}

TEST_CASE("physical constraints are rejected with the violated inequality") {
    CHECK_THROWS_WITH_AS((void)config::parse_config(R"({"B":1, "L":8, "V0":0.3, "epsilon":0.05})"),
                         "model: B > 4*V0 violated", std::invalid_argument);
}

TEST_CASE("unknown keys are rejected with a path-precise message") {
    try {
        (void)config::parse_config(R"({"model": {"B":1, "bogus": 2}})");
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("$.model.bogus") != std::string::npos);
    }
    try {
        (void)config::parse_config(R"({"solver": {"tolx": 1e-9}})");
        FAIL("expected a throw");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("$.solver.tolx") != std::string::npos);
    }
    CHECK_THROWS_AS((void)config::parse_config(R"({"whatever": 1})"), std::invalid_argument);
}

TEST_CASE("canonical round trip is stable") {
    const std::string doc =
        R"({"model": {"B":2.56, "L":9, "V0":0.6, "epsilon":0.004, "cl":6.5536, "c1":6.5536,
             "cr":8.519680, "c2":8.519680},
            "experiment": {"seeds": 7, "fast": true},
            "output": {"dir": "out"}})";
    auto c1 = config::parse_config(doc);
    auto s1 = config::canonical_json(c1);
    auto c2 = config::parse_config(s1);
    auto s2 = config::canonical_json(c2);
    CHECK(s1 == s2);
    CHECK(config::config_hash(c1) == config::config_hash(c2));
    CHECK(config::config_hash(c1).size() == 16);
}

TEST_CASE("malformed JSON is reported") {
    CHECK_THROWS_AS((void)config::parse_config("{oops"), std::invalid_argument);
    CHECK_THROWS_AS((void)config::parse_config("[1,2]"), std::invalid_argument);
}
