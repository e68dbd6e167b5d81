#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "impactsgd/market_model.hpp"

namespace impactsgd {

/// A named execution plan: either a fixed schedule or a feedback policy.
struct Strategy {
    std::string name;
    std::variant<Schedule, Policy> plan;
};

/// Results of simulating every strategy on every noise path.
/// Indexed [strategy][path].
struct CostMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cost;
    std::vector<std::vector<std::uint64_t>> checksum;  ///< NoisePath::checksum of the path consumed
    std::vector<std::vector<Schedule>> realized;

    std::size_t strategies() const noexcept { return names.size(); }
    std::size_t paths() const noexcept { return cost.empty() ? 0 : cost.front().size(); }
    std::size_t index_of(std::string_view name) const;  ///< throws if absent
};

/// Common random numbers: each path is shared by all strategies. Policies
/// re-read X_{t-1} on each path; fixed schedules do not adapt.
CostMatrix evaluate_common(const std::vector<Strategy>& strategies, const MarketParams& params,
                           const ExecutionProblem& problem, std::span<const NoisePath> paths);

/// True when every strategy consumed the same path sequence.
bool is_paired(const CostMatrix& matrix) noexcept;

struct StrategyReport {
    std::string name;
    double cost = 0.0;                   ///< mean over paths
    double excess_per_share = 0.0;       ///< (cost - optimum cost) / total_shares
    double std_within_path = 0.0;        ///< std of B_t over t on path 0
    double std_across_paths_total = 0.0; ///< std of B_{p,t} pooled over all paths and periods
    std::size_t rank = 0;                ///< 1 = cheapest

    bool operator==(const StrategyReport&) const = default;
};

/// One report per strategy, in matrix order, with ranks assigned by mean
/// cost (ties broken by name).
std::vector<StrategyReport> metrics(const CostMatrix& matrix, std::string_view optimum_name,
                                    double total_shares);

/// Rows sorted by cost ascending, ties by name; ranks rewritten to 1..n.
std::vector<StrategyReport> rank_report(std::vector<StrategyReport> reports);

/// Population standard deviation (divides by n). Zero for n < 2.
double population_std(std::span<const double> values) noexcept;

}  // namespace impactsgd
