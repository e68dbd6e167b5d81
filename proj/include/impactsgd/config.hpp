#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "impactsgd/closed_form.hpp"
#include "impactsgd/market_model.hpp"
#include "impactsgd/sgd_engine.hpp"

namespace impactsgd {

enum class OutputFormat { csv, json, both };

std::string_view to_string(OutputFormat f) noexcept;
std::string_view to_string(FeedbackRule r) noexcept;

/// Everything one experiment needs. Keys in the config file match the field
/// names below; optimizer fields can be overridden per variant with dotted
/// keys such as "adam.learning_rate" or "custom.window".
struct ExperimentConfig {
    MarketParams market;
    ExecutionProblem problem;
    OptimizerConfig optimizer;
    std::map<std::string, double> overrides;  ///< "<variant>.<optimizer field>" -> value

    std::uint64_t seed = 42;
    std::size_t paths = 1000;
    std::string out = "out";
    OutputFormat format = OutputFormat::both;
    FeedbackRule optimum_rule = FeedbackRule::dynamic_programming;
    std::string strategy = "optimum";  ///< `simulate`: optimum, uniform or a variant name
    Variant variant = Variant::custom; ///< `optimize`
    double oracle_grid_step = 0.0;     ///< `oracle`: 0 means total_shares / 60

    /// Base optimizer config with this variant's overrides applied.
    OptimizerConfig optimizer_for(Variant v) const;

    /// Throws ConfigError naming the offending parameter and its bound.
    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses a flat JSON object. Unknown keys, nested values and wrong types
/// raise ConfigError. The result is validated.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& flags);

/// Sets one key from its textual form ("0.5", "csv", ...). Does not validate.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Canonical flat JSON with every key present. parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

/// All recognised top-level keys, in emit order.
const std::vector<std::string>& config_keys();

}  // namespace impactsgd
