#include <doctest.h>

#include <set>

#include "impactsgd/config.hpp"
#include "impactsgd/errors.hpp"

using namespace impactsgd;

TEST_SUITE("config") {

TEST_CASE("empty config yields the documented defaults") {
    const auto c = parse_config("");
    CHECK(c == ExperimentConfig{});
    CHECK(parse_config("{}") == ExperimentConfig{});
    CHECK(c.optimizer.learning_rate == 0.025);
    CHECK(c.optimizer.beta1 == 0.98);
    CHECK(c.optimizer.beta2 == 0.99);
    CHECK(c.optimizer.max_iters == 10000);
    CHECK(c.market.sigma_eps == 0.125);
    CHECK(c.problem.total_shares == 100000.0);
    CHECK(c.problem.horizon == 20);
}

TEST_CASE("optimizer hyperparameters round-trip exactly") {
    const auto c = parse_config(R"({"learning_rate": 0.025, "beta1": 0.98, "beta2": 0.99,
                                    "max_iters": 10000, "sigma_eps": 0.125})");
    CHECK(parse_config(emit_config(c)) == c);
    CHECK(c.optimizer.learning_rate == 0.025);
    CHECK(c.market.sigma_eps == 0.125);
}

TEST_CASE("domain violations name the parameter") {
    try {
        parse_config(R"({"rho": 1.5})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("rho") != std::string::npos);
        CHECK(std::string(e.what()).find("< 1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"beta2": 1.0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"horizon": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"paths": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"adam.beta1": 2})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"strategy": "twap"})"), ConfigError);
}

TEST_CASE("unknown keys and malformed input are rejected") {
    try {
        parse_config(R"({"thetaa": 1e-5})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("thetaa") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"adam.momentum": 0.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"sgd.learning_rate": 0.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"market": {"theta": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"([1, 2])"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"theta": "big"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"horizon": 2.5})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"format": "xml"})"), ConfigError);
}

TEST_CASE("per-variant overrides") {
    const auto c = parse_config(R"({"adam.learning_rate": 0.01, "custom.max_iters": 1000})");
    CHECK(c.optimizer_for(Variant::adam).learning_rate == 0.01);
    CHECK(c.optimizer_for(Variant::rmsprop).learning_rate == 0.025);
    CHECK(c.optimizer_for(Variant::custom).max_iters == 1000);
    CHECK(c.optimizer_for(Variant::adam).max_iters == 10000);
    CHECK(parse_config(emit_config(c)) == c);
}

TEST_CASE("flags override file values") {
    const auto c = parse_config(R"({"seed": 1, "rho": 0.2, "format": "json"})",
                                {{"seed", "99"}, {"rho", "0.7"}, {"format", "csv"},
                                 {"out", "results"}, {"adagrad.window", "5"}});
    CHECK(c.seed == 99);
    CHECK(c.market.rho == 0.7);
    CHECK(c.format == OutputFormat::csv);
    CHECK(c.out == "results");
    CHECK(c.optimizer_for(Variant::adagrad).window == 5);
}

TEST_CASE("round trip on random configurations") {
    RandomSource rng(2718);
    for (int trial = 0; trial < 200; ++trial) {
        ExperimentConfig c;
        c.market.theta = rng.uniform() * 1e-3;
        c.market.gamma = (rng.uniform() - 0.5) * 0.2;
        c.market.rho = (rng.uniform() - 0.5) * 1.98;
        c.market.sigma_eps = rng.uniform();
        c.market.sigma_eta = rng.uniform() * 3.0;
        c.market.p0 = 10.0 + 100.0 * rng.uniform();
        c.market.x0 = rng.gaussian();
        c.problem.total_shares = 1.0 + 1e6 * rng.uniform();
        c.problem.horizon = 1 + static_cast<std::size_t>(rng.uniform() * 50);
        c.optimizer.learning_rate = rng.uniform() + 1e-6;
        c.optimizer.beta1 = 0.5 + 0.49 * rng.uniform();
        c.optimizer.beta2 = 0.5 + 0.49 * rng.uniform();
        c.optimizer.max_iters = 1 + static_cast<std::size_t>(rng.uniform() * 1e5);
        c.optimizer.numeric_eps = 1e-12 + rng.uniform() * 1e-6;
        c.optimizer.minibatch = 1 + static_cast<std::size_t>(rng.uniform() * 8);
        c.optimizer.window = 1 + static_cast<std::size_t>(rng.uniform() * 30);
        c.optimizer.hard_cap_factor = 1.0 + 20.0 * rng.uniform();
        c.seed = (static_cast<std::uint64_t>(rng.uniform() * 4294967296.0) << 32) |
                 static_cast<std::uint64_t>(rng.uniform() * 4294967296.0);
        c.paths = 1 + static_cast<std::size_t>(rng.uniform() * 5000);
        c.out = "dir" + std::to_string(trial);
        c.format = trial % 3 == 0 ? OutputFormat::csv : OutputFormat::both;
        c.optimum_rule = trial % 2 ? FeedbackRule::displayed : FeedbackRule::dynamic_programming;
        c.variant = all_variants[trial % 4];
        c.strategy = trial % 5 == 0 ? "uniform" : "optimum";
        c.oracle_grid_step = rng.uniform() * 10.0;
        if (trial % 4 == 1) c.overrides["rmsprop.beta1"] = 0.5 + 0.4 * rng.uniform();
        if (trial % 4 == 2) c.overrides["custom.window"] = 3.0;
        REQUIRE_NOTHROW(c.validate());
        CHECK(parse_config(emit_config(c)) == c);
    }
}

TEST_CASE("every tunable is reachable from the config") {
    const std::set<std::string> keys(config_keys().begin(), config_keys().end());
    for (const char* k :
         {"theta", "gamma", "rho", "sigma_eps", "sigma_eta", "p0", "x0", "total_shares", "horizon",
          "learning_rate", "beta1", "beta2", "max_iters", "numeric_eps", "minibatch", "window",
          "hard_cap_factor", "seed", "paths", "out", "format", "optimum_rule", "strategy",
          "variant", "oracle_grid_step"}) {
        CHECK_MESSAGE(keys.count(k) == 1, k);
    }
}

}
