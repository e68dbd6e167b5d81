#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "impactsgd/benchmark.hpp"
#include "impactsgd/closed_form.hpp"
#include "impactsgd/config.hpp"
#include "impactsgd/sgd_engine.hpp"

namespace impactsgd {

/// Strategy names in report/column order.
inline constexpr const char* optimum_name = "optimum";

/// Random streams derived from the experiment seed:
///   benchmark path p -> derive_seed(derive_seed(seed, "benchmark"), p)
///   SGD variant v    -> derive_seed(seed, "sgd/" + name(v))
RandomSource benchmark_stream(std::uint64_t seed, std::size_t path);
RandomSource optimizer_stream(std::uint64_t seed, Variant v);

std::vector<NoisePath> benchmark_paths(const ExperimentConfig& config);

struct BenchmarkResult {
    std::vector<StrategyReport> reports;  ///< rank order
    std::vector<std::pair<std::string, Schedule>> schedules;  ///< optimum realized on path 0
    std::vector<std::pair<std::string, ConvergenceTrace>> traces;
    CostMatrix matrix;
};

using VariantObserver = std::function<void(Variant, const OptimizerState&)>;

/// Optimizes the four variants, then evaluates them and the closed-form
/// policy on `config.paths` common noise paths.
BenchmarkResult run_benchmark(const ExperimentConfig& config,
                              const VariantObserver& observer = {});

/// `%.17g`: round-trip exact for doubles.
std::string format_number(double v);

std::string report_csv(const std::vector<StrategyReport>& reports);
std::string schedules_csv(const std::vector<std::pair<std::string, Schedule>>& schedules);
std::string trace_csv(const std::vector<std::pair<std::string, ConvergenceTrace>>& traces);

/// Collects named file contents and publishes them into a directory with
/// write-to-temp then rename. Nothing is left behind if any write fails.
class ArtifactSet {
public:
    void add(std::string name, std::string contents);
    void commit(const std::filesystem::path& dir) const;

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

/// Subcommand drivers. Each writes its artifacts into config.out.
void run_benchmark_command(const ExperimentConfig& config);
void run_simulate_command(const ExperimentConfig& config);
void run_optimize_command(const ExperimentConfig& config);
/// Returns false when the closed form misses the oracle bound.
bool run_oracle_command(const ExperimentConfig& config);

/// Reads schedules.csv in `dir` and writes plot_data.csv in long format
/// (strategy, period, shares). Values are copied verbatim.
void emit_plot_data(const std::filesystem::path& dir);

}  // namespace impactsgd
