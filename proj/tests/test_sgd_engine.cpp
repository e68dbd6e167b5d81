#include <doctest.h>

#include <numeric>

#include "impactsgd/closed_form.hpp"
#include "impactsgd/errors.hpp"
#include "impactsgd/sgd_engine.hpp"
#include "test_helpers.hpp"

using namespace impactsgd;
using namespace impactsgd::test;

namespace {

std::vector<double> central_differences(const MarketParams& m, const ExecutionProblem& prob,
                                        const Schedule& s, const NoisePath& noise, double h) {
    std::vector<double> g(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        auto up = s, down = s;
        up.shares[t] += h;
        down.shares[t] -= h;
        g[t] = (simulate_schedule(m, prob, up, noise).cost -
                simulate_schedule(m, prob, down, noise).cost) /
               (2.0 * h);
    }
    return g;
}

OptimizerState fresh(std::size_t T, const OptimizerConfig& cfg, double value = 100.0) {
    return OptimizerState::start(Schedule{std::vector<double>(T, value)}, cfg);
}

}  // namespace

TEST_SUITE("sgd_engine") {

TEST_CASE("cost_gradient hand-differentiated case") {
    const auto m = flat_market(1.0, 0.0, 10.0);
    const auto g = cost_gradient(m, problem(5.0, 2), Schedule{{3.0, 2.0}}, zero_noise(2));
    CHECK(g == std::vector<double>{18.0, 17.0});
}

TEST_CASE("cost_gradient without impact equals the price path") {
    MarketParams m;
    m.theta = 0.0;
    const auto prob = problem(1000.0, 6);
    RandomSource rng(3);
    const auto noise = sample_noise(rng, 6, 0.125, 1.0);
    const auto s = random_feasible(rng, 1000.0, 6);
    const auto g = cost_gradient(m, prob, s, noise);
    const auto out = simulate_schedule(m, prob, s, noise);
    CHECK(g == out.prices);
}

TEST_CASE("cost_gradient matches central finite differences") {
    const MarketParams m;
    const auto prob = problem(100000.0, 20);
    RandomSource rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_feasible(rng, prob.total_shares, 20);
        const auto noise = sample_noise(rng, 20, m.sigma_eps, m.sigma_eta);
        const auto g = cost_gradient(m, prob, s, noise);
        const auto fd = central_differences(m, prob, s, noise, 1e-3);
        for (std::size_t t = 0; t < 20; ++t) worst = std::max(worst, rel_err(g[t], fd[t]));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("cost_gradient length mismatch") {
    CHECK_THROWS_AS(cost_gradient(MarketParams{}, problem(10.0, 3), Schedule{{1.0, 2.0}},
                                  zero_noise(3)),
                    DimensionError);
}

TEST_CASE("project_box forward sweep") {
    CHECK(project_box(Schedule{{-5.0, 50.0, 60.0}}, 100.0).shares ==
          std::vector<double>{0.0, 50.0, 50.0});
    CHECK(project_box(Schedule{{200.0, 10.0}}, 100.0).shares == std::vector<double>{100.0, 0.0});
    const Schedule feasible{{10.0, 30.0, 60.0}};
    CHECK(project_box(feasible, 100.0) == feasible);
}

TEST_CASE("project_budget rescale") {
    const auto r = project_budget(Schedule{{30.0, 30.0, 60.0}}, 100.0);
    CHECK(r.shares[0] == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(r.shares[1] == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(r.shares[2] == doctest::Approx(50.0).epsilon(1e-15));

    const auto z = project_budget(Schedule{{0.0, 0.0, 0.0}}, 100.0);
    for (double b : z.shares) CHECK(b == doctest::Approx(100.0 / 3.0).epsilon(1e-15));

    const Schedule on{{20.0, 30.0, 50.0}};
    const auto same = project_budget(on, 100.0);
    for (std::size_t t = 0; t < 3; ++t) CHECK(rel_err(same.shares[t], on.shares[t]) <= 1e-12);
}

TEST_CASE("box-then-budget projection is idempotent") {
    RandomSource rng(55);
    for (int trial = 0; trial < 500; ++trial) {
        Schedule s;
        s.shares.resize(20);
        for (double& b : s.shares) b = 12000.0 * (rng.uniform() - 0.3);
        const auto once = project_budget(project_box(s, 1e5), 1e5);
        const auto twice = project_budget(project_box(once, 1e5), 1e5);
        CHECK(is_feasible(once, problem(1e5, 20)));
        for (std::size_t t = 0; t < 20; ++t) {
            CHECK(std::abs(once.shares[t] - twice.shares[t]) <= 1e-12 * 1e5);
        }
    }
}

TEST_CASE("adagrad steps") {
    OptimizerConfig cfg;
    auto s = fresh(3, cfg);
    const std::vector<double> g(3, 200.0);
    step_adagrad(s, g, cfg);
    const double first = 100.0 - s.iterate[0];
    CHECK(first == doctest::Approx(0.025 * 200.0 / std::sqrt(200.0 * 200.0 + 1e-8)).epsilon(1e-12));
    CHECK(rel_err(first, 0.025) <= 1e-6);
    const double before = s.iterate[0];
    step_adagrad(s, g, cfg);
    CHECK(std::abs((before - s.iterate[0]) - 0.025 / std::sqrt(2.0)) <= 1e-9);

    auto still = fresh(3, cfg);
    step_adagrad(still, std::vector<double>(3, 0.0), cfg);
    CHECK(still.iterate == std::vector<double>(3, 100.0));
    CHECK(still.accum_sq == std::vector<double>(3, 0.0));
}

TEST_CASE("adagrad accumulator is nondecreasing") {
    OptimizerConfig cfg;
    auto s = fresh(5, cfg);
    RandomSource rng(8);
    auto last = s.accum_sq;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> g(5);
        for (double& x : g) x = 50.0 * rng.gaussian();
        step_adagrad(s, g, cfg);
        for (std::size_t t = 0; t < 5; ++t) CHECK(s.accum_sq[t] >= last[t]);
        last = s.accum_sq;
    }
}

TEST_CASE("rmsprop steps") {
    OptimizerConfig cfg;
    auto s = fresh(2, cfg);
    step_rmsprop(s, std::vector<double>{55.0, -3.0}, cfg);
    CHECK(rel_err(100.0 - s.iterate[0], 0.025 / std::sqrt(0.02)) <= 1e-6);
    CHECK(rel_err(s.iterate[1] - 100.0, 0.025 / std::sqrt(0.02)) <= 1e-6);
    CHECK(rel_err(0.025 / std::sqrt(0.02), 7.0711 * 0.025) <= 1e-5);

    auto still = fresh(2, cfg);
    for (int i = 0; i < 10; ++i) step_rmsprop(still, std::vector<double>(2, 0.0), cfg);
    CHECK(still.iterate == std::vector<double>(2, 100.0));

    auto steady = fresh(1, cfg);
    double step = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const double before = steady.iterate[0];
        step_rmsprop(steady, std::vector<double>{40.0}, cfg);
        step = before - steady.iterate[0];
    }
    CHECK(rel_err(step, 0.025) <= 1e-9);
}

TEST_CASE("adam steps") {
    OptimizerConfig cfg;
    auto s = fresh(2, cfg);
    step_adam(s, std::vector<double>{7.0, -250.0}, cfg);
    CHECK(s.iteration == 1);
    CHECK(rel_err(100.0 - s.iterate[0], 0.025) <= 1e-4);
    CHECK(rel_err(s.iterate[1] - 100.0, 0.025) <= 1e-4);

    auto still = fresh(2, cfg);
    for (int i = 0; i < 10; ++i) step_adam(still, std::vector<double>(2, 0.0), cfg);
    CHECK(still.iterate == std::vector<double>(2, 100.0));

    auto steady = fresh(1, cfg);
    double step = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const double before = steady.iterate[0];
        step_adam(steady, std::vector<double>{40.0}, cfg);
        step = before - steady.iterate[0];
    }
    CHECK(rel_err(step, 0.025) <= 1e-9);
}

TEST_CASE("custom step: learning-rate and budget schedule") {
    OptimizerConfig cfg;
    SUBCASE("empty history takes the growing-gradient branch") {
        auto s = fresh(4, cfg, 25.0);
        step_custom(s, std::vector<double>{1.0, -1.0, 0.5, -0.5}, cfg, 100.0);
        CHECK(s.lr_current == doctest::Approx(0.025 + 0.5 / 10000.0).epsilon(1e-15));
        CHECK(s.budget_current == doctest::Approx(10000.0 + 2.0 / 10000.0).epsilon(1e-15));
        CHECK(s.norm_history.size() == 1);
    }
    SUBCASE("shrinking gradient") {
        auto s = fresh(4, cfg, 25.0);
        step_custom(s, std::vector<double>{1.0, -1.0, 1.0, -1.0}, cfg, 100.0);
        const double lr = s.lr_current;
        const double budget = s.budget_current;
        step_custom(s, std::vector<double>{0.1, -0.1, 0.1, -0.1}, cfg, 100.0);
        CHECK(s.lr_current - lr == doctest::Approx(2.0 / budget).epsilon(1e-9));
        CHECK(s.budget_current - budget == doctest::Approx(0.5 / budget).epsilon(1e-9));
        CHECK(2.0 / budget == doctest::Approx(2e-4).epsilon(1e-6));
        CHECK(0.5 / budget == doctest::Approx(5e-5).epsilon(1e-6));
    }
    SUBCASE("ties go to the shrinking branch") {
        auto s = fresh(2, cfg, 50.0);
        step_custom(s, std::vector<double>{3.0, -3.0}, cfg, 100.0);
        const double budget = s.budget_current;
        step_custom(s, std::vector<double>{3.0, -3.0}, cfg, 100.0);
        CHECK(s.budget_current - budget == doctest::Approx(0.5 / budget).epsilon(1e-9));
    }
    SUBCASE("window is bounded") {
        auto s = fresh(2, cfg, 50.0);
        for (int i = 0; i < 25; ++i) step_custom(s, std::vector<double>{1e-3, -1e-3}, cfg, 100.0);
        CHECK(s.norm_history.size() == cfg.window);
    }
}

TEST_CASE("custom step: out-of-box coordinate resets to the uniform split of what is left") {
    OptimizerConfig cfg;
    std::vector<double> init(20, 0.0);
    for (std::size_t t = 0; t < 4; ++t) init[t] = 5000.0;  // S_5 = 80,000
    for (std::size_t t = 4; t < 20; ++t) init[t] = 5000.0;
    auto s = OptimizerState::start(Schedule{init}, cfg);
    s.norm_history.push_back(std::vector<double>(20, 1.0));
    std::vector<double> g(20, 0.0);
    g[4] = 1e7;  // drives period 5 negative
    const auto resets = step_custom(s, g, cfg, 100000.0);
    CHECK(resets == 1);
    CHECK(s.iterate[4] == doctest::Approx(80000.0 / 16.0).epsilon(1e-15));
    CHECK(s.iterate[4] == doctest::Approx(5000.0).epsilon(1e-15));
    // period 5 is purged from the stored norms, the rest is untouched
    CHECK(s.norm_history.front()[4] == 0.0);
    CHECK(s.norm_history.front()[3] == 1.0);
    CHECK(s.norm_history.back()[4] == 0.0);
}

TEST_CASE("optimizer config validation") {
    OptimizerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.beta1 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = {};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = {};
    cfg.numeric_eps = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    CHECK(parse_variant("adam") == Variant::adam);
    CHECK_THROWS_AS(parse_variant("sgd"), ParameterError);
}

TEST_CASE("flat objective leaves every variant at the uniform split") {
    auto m = flat_market(0.0, 0.0, 50.0);
    const auto prob = problem(100000.0, 20);
    OptimizerConfig cfg;
    cfg.max_iters = 500;
    for (Variant v : all_variants) {
        RandomSource rng(1);
        const auto r = run_optimizer(v, cfg, m, prob, rng);
        for (double b : r.schedule.shares) CHECK(std::abs(b - 5000.0) <= 1e-9 * 5000.0);
    }
}

TEST_CASE("adagrad recovers the uniform split for gamma = 0") {
    auto m = flat_market(5e-5, 0.0, 50.0);
    const auto prob = problem(100000.0, 20);
    OptimizerConfig cfg;
    RandomSource rng(2);
    const auto r = run_optimizer(Variant::adagrad, cfg, m, prob, rng);
    CHECK(r.trace.size() == 10000);
    for (double b : r.schedule.shares) CHECK(std::abs(b - 5000.0) <= 0.01 * 5000.0);

    // and agrees with the T = 3 grid oracle
    const auto small = problem(6000.0, 3);
    RandomSource rng3(3);
    const auto r3 = run_optimizer(Variant::adagrad, cfg, m, small, rng3);
    const auto oracle = brute_force_oracle(m, small, 100.0, zero_noise(3));
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(std::abs(r3.schedule.shares[t] - oracle.schedule.shares[t]) <= 0.01 * 2000.0);
    }
}

TEST_CASE("run_optimizer is deterministic and feasible after every iteration") {
    const MarketParams m;
    const auto prob = problem(100000.0, 20);
    OptimizerConfig cfg;
    cfg.max_iters = 2000;
    cfg.minibatch = 2;
    for (Variant v : all_variants) {
        std::size_t violations = 0;
        std::size_t calls = 0;
        double last_budget = 0.0;
        bool budget_increasing = true;
        RandomSource a(9), b(9);
        const auto r1 = run_optimizer(v, cfg, m, prob, a, [&](const OptimizerState& s) {
            ++calls;
            if (!is_feasible(Schedule{s.iterate}, prob, 1e-9)) ++violations;
            if (v == Variant::custom) {
                budget_increasing = budget_increasing && s.budget_current > last_budget;
                last_budget = s.budget_current;
            }
        });
        const auto r2 = run_optimizer(v, cfg, m, prob, b);
        CHECK(violations == 0);
        CHECK(calls == r1.trace.size());
        CHECK(budget_increasing);
        CHECK(r1.schedule == r2.schedule);
        CHECK(r1.trace == r2.trace);
        if (v == Variant::custom) {
            CHECK(r1.trace.size() >= cfg.max_iters);
            CHECK(r1.trace.size() <= 10 * cfg.max_iters);
        } else {
            CHECK(r1.trace.size() == cfg.max_iters);
        }
    }
}

TEST_CASE("custom respects the hard iteration cap") {
    const MarketParams m;
    const auto prob = problem(100000.0, 20);
    OptimizerConfig cfg;
    cfg.max_iters = 2;  // a tiny budget grows by ~2/budget per step, so it outruns 2
    RandomSource rng(5);
    const auto free_run = run_optimizer(Variant::custom, cfg, m, prob, rng);
    CHECK(free_run.trace.size() > 2);
    CHECK(free_run.trace.size() <= 20);
    for (std::size_t i = 0; i < free_run.trace.size(); ++i) {
        CHECK(free_run.trace[i].iteration == i + 1);
    }

    cfg.hard_cap_factor = 1.0;
    RandomSource rng2(5);
    CHECK(run_optimizer(Variant::custom, cfg, m, prob, rng2).trace.size() == 2);
}

}
