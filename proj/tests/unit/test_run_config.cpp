#include <doctest.h>

#include <stdexcept>

#include "walkbsde/run_config.hpp"

using namespace walkbsde;

TEST_CASE("canonical form round trips") {
    RunConfig config;
    config.command = "rates";
    config.problem = "holder-g";
    config.eps = 0.5;
    config.n_list = {16, 64, 256, 1024};
    config.times = {0.5};
    config.r_list = {1.0};
    std::string canonical = config.canonical();
    RunConfig reparsed = parse_config_text(canonical);
    CHECK(reparsed.canonical() == canonical);
    CHECK(reparsed.content_hash() == config.content_hash());
}

TEST_CASE("hash tracks content") {
    RunConfig a;
    RunConfig b;
    CHECK(a.content_hash() == b.content_hash());
    b.eps = 0.25;
    CHECK(a.content_hash() != b.content_hash());
}

TEST_CASE("unknown keys are named") {
    CHECK_THROWS_WITH_AS(parse_config_text("bogus_key = 3\n"),
                         doctest::Contains("bogus_key"), std::invalid_argument);
}

TEST_CASE("malformed numerics are rejected") {
    CHECK_THROWS_WITH_AS(parse_config_text("eps = abc\n"), doctest::Contains("malformed"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("n = 4,x\n"), doctest::Contains("malformed"),
                         std::invalid_argument);
}

TEST_CASE("contraction violations report the minimal n") {
    RunConfig config;
    config.command = "rates";
    config.problem = "linear";
    config.lambda = 10.0;
    config.horizon = 1.0;
    config.n_list = {2};
    CHECK_THROWS_WITH_AS(validate_config(config), doctest::Contains("minimal valid n = 20"),
                         std::invalid_argument);
}

TEST_CASE("unknown problems list the available ids") {
    RunConfig config;
    config.problem = "mystery";
    CHECK_THROWS_WITH_AS(validate_config(config), doctest::Contains("available"),
                         std::invalid_argument);
}

TEST_CASE("unknown commands rejected") {
    RunConfig config;
    config.command = "explode";
    CHECK_THROWS_AS(validate_config(config), std::invalid_argument);
}
