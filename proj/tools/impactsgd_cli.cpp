// impactsgd: simulate, optimize, benchmark and oracle-check execution schedules.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "impactsgd/errors.hpp"
#include "impactsgd/experiment.hpp"

namespace {

constexpr int exit_config_error = 2;
constexpr int exit_runtime_error = 3;

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "Flat JSON config file");
    cmd->add_option("--seed", f.seed, "Master random seed (u64)");
    cmd->add_option("--paths", f.paths, "Number of common noise paths");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--format", f.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--set", f.settings, "Override any config key: --set key=value");
}

impactsgd::ExperimentConfig resolve(const Flags& f) {
    std::string text;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw impactsgd::ConfigError("cannot read config file " + f.config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : f.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw impactsgd::ConfigError("--set expects key=value, got '" + s + "'");
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (f.seed) overrides.emplace_back("seed", std::to_string(*f.seed));
    if (f.paths) overrides.emplace_back("paths", std::to_string(*f.paths));
    if (f.out) overrides.emplace_back("out", "\"" + *f.out + "\"");
    if (f.format) overrides.emplace_back("format", *f.format);
    return impactsgd::parse_config(text, overrides);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal execution under permanent price impact: closed form vs projected SGD"};
    app.require_subcommand(1);

    Flags flags;
    auto* simulate = app.add_subcommand("simulate", "Run one strategy on one noise path");
    auto* optimize = app.add_subcommand("optimize", "Run one SGD variant");
    auto* benchmark = app.add_subcommand("benchmark", "Compare all strategies on common noise");
    auto* oracle = app.add_subcommand("oracle", "Brute-force check of the closed form (T <= 4)");
    for (auto* cmd : {simulate, optimize, benchmark, oracle}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    impactsgd::ExperimentConfig config;
    try {
        config = resolve(flags);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    try {
        if (*simulate) impactsgd::run_simulate_command(config);
        if (*optimize) impactsgd::run_optimize_command(config);
        if (*benchmark) impactsgd::run_benchmark_command(config);
        if (*oracle && !impactsgd::run_oracle_command(config)) return exit_runtime_error;
    } catch (const impactsgd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime_error;
    }
    return 0;
}
