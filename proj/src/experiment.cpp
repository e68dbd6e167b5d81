#include "impactsgd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "impactsgd/errors.hpp"

namespace impactsgd {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

RandomSource benchmark_stream(std::uint64_t seed, std::size_t path) {
    return RandomSource(derive_seed(derive_seed(seed, "benchmark"), path));
}

RandomSource optimizer_stream(std::uint64_t seed, Variant v) {
    return RandomSource(derive_seed(seed, "sgd/" + std::string(to_string(v))));
}

std::vector<NoisePath> benchmark_paths(const ExperimentConfig& config) {
    std::vector<NoisePath> paths;
    paths.reserve(config.paths);
    for (std::size_t p = 0; p < config.paths; ++p) {
        auto rng = benchmark_stream(config.seed, p);
        paths.push_back(sample_noise(rng, config.problem.horizon, config.market.sigma_eps,
                                     config.market.sigma_eta));
    }
    return paths;
}

BenchmarkResult run_benchmark(const ExperimentConfig& config, const VariantObserver& observer) {
    config.validate();
    BenchmarkResult result;

    std::vector<Strategy> strategies;
    strategies.push_back(
        {optimum_name, closed_form_policy(coefficients(config.problem, config.market,
                                                       config.optimum_rule))});
    for (Variant v : all_variants) {
        auto rng = optimizer_stream(config.seed, v);
        IterationObserver hook;
        if (observer) hook = [&observer, v](const OptimizerState& s) { observer(v, s); };
        auto run = run_optimizer(v, config.optimizer_for(v), config.market, config.problem, rng,
                                 hook);
        strategies.push_back({std::string(to_string(v)), run.schedule});
        result.traces.emplace_back(std::string(to_string(v)), std::move(run.trace));
    }

    const auto paths = benchmark_paths(config);
    result.matrix = evaluate_common(strategies, config.market, config.problem, paths);
    result.reports = rank_report(metrics(result.matrix, optimum_name, config.problem.total_shares));
    for (std::size_t s = 0; s < result.matrix.strategies(); ++s) {
        result.schedules.emplace_back(result.matrix.names[s], result.matrix.realized[s].front());
    }
    return result;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string report_csv(const std::vector<StrategyReport>& reports) {
    std::string out = "strategy,cost,excess_per_share,std_within_path,std_across_paths_total,rank\n";
    for (const auto& r : reports) {
        out += r.name + "," + format_number(r.cost) + "," + format_number(r.excess_per_share) +
               "," + format_number(r.std_within_path) + "," +
               format_number(r.std_across_paths_total) + "," + std::to_string(r.rank) + "\n";
    }
    return out;
}

std::string schedules_csv(const std::vector<std::pair<std::string, Schedule>>& schedules) {
    std::string out = "period";
    std::size_t T = 0;
    for (const auto& [name, s] : schedules) {
        out += "," + name;
        T = std::max(T, s.size());
    }
    out += "\n";
    for (std::size_t t = 0; t < T; ++t) {
        out += std::to_string(t + 1);
        for (const auto& [name, s] : schedules) {
            if (s.size() != T) throw DimensionError("schedules_csv: ragged schedules");
            out += "," + format_number(s.shares[t]);
        }
        out += "\n";
    }
    return out;
}

std::string trace_csv(const std::vector<std::pair<std::string, ConvergenceTrace>>& traces) {
    std::string out = "strategy,iteration,objective,grad_norm,learning_rate\n";
    for (const auto& [name, trace] : traces) {
        for (const auto& r : trace) {
            out += name + "," + std::to_string(r.iteration) + "," + format_number(r.objective) +
                   "," + format_number(r.grad_norm) + "," + format_number(r.learning_rate) + "\n";
        }
    }
    return out;
}

void ArtifactSet::add(std::string name, std::string contents) {
    files_.emplace_back(std::move(name), std::move(contents));
}

void ArtifactSet::commit(const fs::path& dir) const {
    fs::create_directories(dir);
    std::vector<fs::path> temps;
    auto cleanup = [&temps] {
        std::error_code ec;
        for (const auto& p : temps) fs::remove(p, ec);
    };
    try {
        for (const auto& [name, contents] : files_) {
            const fs::path tmp = dir / ("." + name + ".tmp");
            temps.push_back(tmp);
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            os << contents;
            os.close();
            if (!os) throw std::runtime_error("failed to write " + tmp.string());
        }
        for (std::size_t i = 0; i < files_.size(); ++i) {
            fs::rename(temps[i], dir / files_[i].first);
        }
    } catch (...) {
        cleanup();
        throw;
    }
}

namespace {

bool wants_csv(const ExperimentConfig& c) { return c.format != OutputFormat::json; }
bool wants_json(const ExperimentConfig& c) { return c.format != OutputFormat::csv; }

// The output directory is left out so artifacts do not depend on where they are written.
ordered_json config_json(const ExperimentConfig& c) {
    auto doc = ordered_json::parse(emit_config(c));
    doc.erase("out");
    return doc;
}

ordered_json to_json(const StrategyReport& r) {
    return {{"strategy", r.name},
            {"cost", r.cost},
            {"excess_per_share", r.excess_per_share},
            {"std_within_path", r.std_within_path},
            {"std_across_paths_total", r.std_across_paths_total},
            {"rank", r.rank}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

void run_benchmark_command(const ExperimentConfig& config) {
    const auto result = run_benchmark(config);
    ArtifactSet files;
    if (wants_csv(config)) {
        files.add("report.csv", report_csv(result.reports));
        files.add("schedules.csv", schedules_csv(result.schedules));
        files.add("trace.csv", trace_csv(result.traces));
    }
    if (wants_json(config)) {
        ordered_json doc;
        doc["config"] = config_json(config);
        doc["seed"] = config.seed;
        doc["paths"] = config.paths;
        doc["reports"] = ordered_json::array();
        for (const auto& r : result.reports) doc["reports"].push_back(to_json(r));
        files.add("report.json", doc.dump(2) + "\n");
    }
    files.commit(config.out);
    if (wants_csv(config)) emit_plot_data(config.out);

    for (const auto& r : result.reports) {
        std::cout << r.rank << "  " << r.name << "  cost=" << format_number(r.cost)
                  << "  excess_per_share=" << format_number(r.excess_per_share) << "\n";
    }
}

void run_simulate_command(const ExperimentConfig& config) {
    config.validate();
    auto rng = benchmark_stream(config.seed, 0);
    const auto noise = sample_noise(rng, config.problem.horizon, config.market.sigma_eps,
                                    config.market.sigma_eta);
    Schedule schedule;
    PathOutcome outcome;
    if (config.strategy == optimum_name) {
        auto run = simulate_policy(
            config.market, config.problem,
            closed_form_policy(coefficients(config.problem, config.market, config.optimum_rule)),
            noise);
        schedule = std::move(run.schedule);
        outcome = std::move(run.outcome);
    } else {
        if (config.strategy == "uniform") {
            schedule.shares.assign(config.problem.horizon,
                                   config.problem.total_shares /
                                       static_cast<double>(config.problem.horizon));
        } else {
            const Variant v = parse_variant(config.strategy);
            auto opt_rng = optimizer_stream(config.seed, v);
            schedule = run_optimizer(v, config.optimizer_for(v), config.market, config.problem,
                                     opt_rng)
                           .schedule;
        }
        outcome = simulate_schedule(config.market, config.problem, schedule, noise);
    }

    ArtifactSet files;
    if (wants_csv(config)) {
        std::string csv = "period,shares,price,info,remaining\n";
        for (std::size_t t = 0; t < schedule.size(); ++t) {
            csv += std::to_string(t + 1) + "," + format_number(schedule.shares[t]) + "," +
                   format_number(outcome.prices[t]) + "," + format_number(outcome.info[t + 1]) +
                   "," + format_number(outcome.remaining[t]) + "\n";
        }
        files.add("simulation.csv", csv);
    }
    if (wants_json(config)) {
        ordered_json doc;
        doc["config"] = config_json(config);
        doc["strategy"] = config.strategy;
        doc["cost"] = outcome.cost;
        doc["noise_checksum"] = noise.checksum();
        doc["shares"] = schedule.shares;
        doc["prices"] = outcome.prices;
        files.add("simulation.json", doc.dump(2) + "\n");
    }
    files.commit(config.out);
    std::cout << config.strategy << "  cost=" << format_number(outcome.cost) << "\n";
}

void run_optimize_command(const ExperimentConfig& config) {
    config.validate();
    auto rng = optimizer_stream(config.seed, config.variant);
    const auto run = run_optimizer(config.variant, config.optimizer_for(config.variant),
                                   config.market, config.problem, rng);
    const std::string name(to_string(config.variant));
    ArtifactSet files;
    if (wants_csv(config)) {
        files.add("schedules.csv", schedules_csv({{name, run.schedule}}));
        files.add("trace.csv", trace_csv({{name, run.trace}}));
    }
    if (wants_json(config)) {
        ordered_json doc;
        doc["config"] = config_json(config);
        doc["variant"] = name;
        doc["iterations"] = run.trace.size();
        doc["final_objective"] = run.trace.empty() ? 0.0 : run.trace.back().objective;
        doc["shares"] = run.schedule.shares;
        files.add("optimize.json", doc.dump(2) + "\n");
    }
    files.commit(config.out);
    std::cout << name << "  iterations=" << run.trace.size() << "\n";
}

bool run_oracle_command(const ExperimentConfig& config) {
    config.validate();
    const auto& problem = config.problem;
    const double grid =
        config.oracle_grid_step > 0.0 ? config.oracle_grid_step : problem.total_shares / 60.0;
    auto rng = benchmark_stream(config.seed, 0);
    const auto noise =
        sample_noise(rng, problem.horizon, config.market.sigma_eps, config.market.sigma_eta);

    const auto oracle = brute_force_oracle(config.market, problem, grid, noise);
    const auto closed = simulate_policy(
        config.market, problem,
        closed_form_policy(coefficients(problem, config.market, config.optimum_rule)), noise);

    const auto grad = cost_gradient(config.market, problem, oracle.schedule, noise);
    double max_grad = 0.0;
    for (double g : grad) max_grad = std::max(max_grad, std::abs(g));
    const double step_bound = grid * max_grad + config.market.theta * grid * grid;
    double max_gap = 0.0;
    for (std::size_t t = 0; t < problem.horizon; ++t) {
        max_gap = std::max(max_gap, std::abs(closed.schedule.shares[t] - oracle.schedule.shares[t]));
    }
    const bool ok = closed.outcome.cost <= oracle.cost + step_bound;

    ArtifactSet files;
    if (wants_csv(config)) {
        std::string csv = "period,oracle,closed_form\n";
        for (std::size_t t = 0; t < problem.horizon; ++t) {
            csv += std::to_string(t + 1) + "," + format_number(oracle.schedule.shares[t]) + "," +
                   format_number(closed.schedule.shares[t]) + "\n";
        }
        files.add("oracle.csv", csv);
    }
    if (wants_json(config)) {
        ordered_json doc;
        doc["config"] = config_json(config);
        doc["grid_step"] = grid;
        doc["evaluated"] = oracle.evaluated;
        doc["oracle_cost"] = oracle.cost;
        doc["closed_form_cost"] = closed.outcome.cost;
        doc["one_step_bound"] = step_bound;
        doc["max_coordinate_gap"] = max_gap;
        doc["within_bound"] = ok;
        files.add("oracle.json", doc.dump(2) + "\n");
    }
    files.commit(config.out);
    std::cout << "oracle cost=" << format_number(oracle.cost)
              << "  closed_form cost=" << format_number(closed.outcome.cost)
              << "  bound=" << format_number(step_bound) << (ok ? "  OK" : "  FAIL") << "\n";
    return ok;
}

void emit_plot_data(const fs::path& dir) {
    const fs::path source = dir / "schedules.csv";
    std::ifstream in(source);
    if (!in) throw std::runtime_error("missing artifact " + source.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty artifact " + source.string());
    const auto header = split_csv_line(line);
    if (header.empty() || header.front() != "period") {
        throw std::runtime_error("unexpected schedules.csv header");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw std::runtime_error("ragged schedules.csv row");
        rows.push_back(std::move(cells));
    }
    std::string out = "strategy,period,shares\n";
    for (std::size_t col = 1; col < header.size(); ++col) {
        for (const auto& row : rows) out += header[col] + "," + row[0] + "," + row[col] + "\n";
    }
    ArtifactSet files;
    files.add("plot_data.csv", out);
    files.commit(dir);
}

}  // namespace impactsgd
