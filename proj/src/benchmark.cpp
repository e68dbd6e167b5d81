#include "impactsgd/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "impactsgd/errors.hpp"

namespace impactsgd {

std::size_t CostMatrix::index_of(std::string_view name) const {
    for (std::size_t s = 0; s < names.size(); ++s) {
        if (names[s] == name) return s;
    }
    throw ParameterError("strategy '" + std::string(name) + "' not in cost matrix");
}

CostMatrix evaluate_common(const std::vector<Strategy>& strategies, const MarketParams& params,
                           const ExecutionProblem& problem, std::span<const NoisePath> paths) {
    if (paths.empty()) throw DimensionError("evaluate_common needs at least one noise path");
    if (strategies.empty()) throw DimensionError("evaluate_common needs at least one strategy");
    for (const auto& s : strategies) {
        if (const auto* fixed = std::get_if<Schedule>(&s.plan);
            fixed != nullptr && fixed->size() != problem.horizon) {
            throw DimensionError("schedule '" + s.name + "' has length " +
                                 std::to_string(fixed->size()) + ", horizon is " +
                                 std::to_string(problem.horizon));
        }
    }

    CostMatrix m;
    const std::size_t S = strategies.size();
    const std::size_t P = paths.size();
    m.names.reserve(S);
    for (const auto& s : strategies) m.names.push_back(s.name);
    m.cost.assign(S, std::vector<double>(P));
    m.checksum.assign(S, std::vector<std::uint64_t>(P));
    m.realized.assign(S, std::vector<Schedule>(P));

    for (std::size_t p = 0; p < P; ++p) {
        const NoisePath& noise = paths[p];
        const std::uint64_t digest = noise.checksum();
        for (std::size_t s = 0; s < S; ++s) {
            const auto& plan = strategies[s].plan;
            if (const auto* fixed = std::get_if<Schedule>(&plan)) {
                m.cost[s][p] = simulate_schedule(params, problem, *fixed, noise).cost;
                m.realized[s][p] = *fixed;
            } else {
                auto run = simulate_policy(params, problem, std::get<Policy>(plan), noise);
                m.cost[s][p] = run.outcome.cost;
                m.realized[s][p] = std::move(run.schedule);
            }
            m.checksum[s][p] = digest;
        }
    }
    return m;
}

bool is_paired(const CostMatrix& matrix) noexcept {
    for (const auto& row : matrix.checksum) {
        if (row != matrix.checksum.front()) return false;
    }
    return true;
}

double population_std(std::span<const double> values) noexcept {
    if (values.size() < 2) return 0.0;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n);
}

namespace {

bool cheaper(const StrategyReport& a, const StrategyReport& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.name < b.name;
}

}  // namespace

std::vector<StrategyReport> metrics(const CostMatrix& matrix, std::string_view optimum_name,
                                    double total_shares) {
    if (matrix.strategies() == 0 || matrix.paths() == 0) {
        throw DimensionError("metrics: empty cost matrix");
    }
    if (!(total_shares > 0.0)) throw ParameterError("metrics: total_shares must be > 0");
    const std::size_t P = matrix.paths();
    for (const auto& row : matrix.cost) {
        if (row.size() != P) throw DimensionError("metrics: ragged cost matrix");
    }

    std::vector<StrategyReport> out(matrix.strategies());
    for (std::size_t s = 0; s < out.size(); ++s) {
        auto& r = out[s];
        r.name = matrix.names[s];
        r.cost = std::accumulate(matrix.cost[s].begin(), matrix.cost[s].end(), 0.0) /
                 static_cast<double>(P);
        if (s < matrix.realized.size() && !matrix.realized[s].empty()) {
            const auto& paths = matrix.realized[s];
            r.std_within_path = population_std(paths.front().shares);
            std::vector<double> pooled;
            for (const auto& sched : paths) {
                pooled.insert(pooled.end(), sched.shares.begin(), sched.shares.end());
            }
            r.std_across_paths_total = population_std(pooled);
        }
    }

    const double reference = out[matrix.index_of(optimum_name)].cost;
    for (auto& r : out) {
        r.excess_per_share = r.name == optimum_name ? 0.0 : (r.cost - reference) / total_shares;
    }

    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&out](std::size_t a, std::size_t b) { return cheaper(out[a], out[b]); });
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]].rank = i + 1;
    return out;
}

std::vector<StrategyReport> rank_report(std::vector<StrategyReport> reports) {
    std::stable_sort(reports.begin(), reports.end(), cheaper);
    for (std::size_t i = 0; i < reports.size(); ++i) reports[i].rank = i + 1;
    return reports;
}

}  // namespace impactsgd
