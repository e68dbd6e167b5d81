#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "impactsgd/random.hpp"

namespace impactsgd {

/// Coefficients of the additive permanent price-impact market
///
///   P_t = P_{t-1} + theta * B_t + gamma * X_t + eps_t
///   X_t = rho * X_{t-1} + eta_t
///
/// with eps_t ~ N(0, sigma_eps^2) and eta_t ~ N(0, sigma_eta^2).
struct MarketParams {
    double theta = 5e-5;      ///< permanent impact, currency per share per share
    double gamma = 5e-2;      ///< information impact, currency per information unit
    double rho = 0.5;         ///< information autocorrelation, |rho| < 1
    double sigma_eps = 0.125; ///< price shock std (one tick)
    double sigma_eta = 1.0;   ///< information shock std
    double p0 = 50.0;         ///< pre-trade price
    double x0 = 0.0;          ///< initial information level

    /// Throws ParameterError naming the first violated bound.
    void validate() const;

    bool operator==(const MarketParams&) const = default;
};

struct ExecutionProblem {
    double total_shares = 100000.0;
    std::size_t horizon = 20;

    void validate() const;

    bool operator==(const ExecutionProblem&) const = default;
};

/// One realization of the price and information shocks, both of length T.
struct NoisePath {
    std::vector<double> eps;
    std::vector<double> eta;

    std::size_t horizon() const noexcept { return eps.size(); }

    /// FNV-style digest over the raw bits of both sequences. Two strategies
    /// simulated on the same path record the same checksum.
    std::uint64_t checksum() const noexcept;
};

/// Period purchases B_1..B_T (real-valued shares).
struct Schedule {
    std::vector<double> shares;

    std::size_t size() const noexcept { return shares.size(); }
    double total() const noexcept;

    bool operator==(const Schedule&) const = default;
};

/// Nonnegative and summing to total_shares within rel_tol.
bool is_feasible(const Schedule& schedule, const ExecutionProblem& problem,
                 double rel_tol = 1e-9);

struct PathOutcome {
    std::vector<double> prices;     ///< P_1..P_T
    std::vector<double> info;       ///< X_0..X_T
    std::vector<double> remaining;  ///< S_1..S_{T+1}; remaining[0] = total_shares
    double cost = 0.0;              ///< sum_t P_t B_t
};

/// Draws T independent shocks per sequence. All eps draws are taken before
/// all eta draws, so a path depends only on (rng state, T, sigmas).
NoisePath sample_noise(RandomSource& rng, std::size_t horizon, double sigma_eps,
                       double sigma_eta);

std::vector<double> propagate_info(double x0, double rho, std::span<const double> eta);

/// Prices and cost of a fixed schedule. Only lengths are checked, so
/// infeasible vectors (e.g. finite-difference probes) are accepted.
PathOutcome simulate_schedule(const MarketParams& params, const ExecutionProblem& problem,
                              const Schedule& schedule, const NoisePath& noise);

/// State-feedback rule: (period t in 1..T, remaining S_t, X_{t-1}) -> order size.
using Policy = std::function<double(std::size_t, double, double)>;

struct PolicyRun {
    Schedule schedule;
    PathOutcome outcome;
};

/// Runs a feedback policy along a noise path. Orders are clipped into
/// [0, S_t] and the last period always buys whatever is left.
PolicyRun simulate_policy(const MarketParams& params, const ExecutionProblem& problem,
                          const Policy& policy, const NoisePath& noise);

}  // namespace impactsgd
