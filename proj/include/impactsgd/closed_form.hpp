#pragma once

#include <cstddef>
#include <vector>

#include "impactsgd/market_model.hpp"

namespace impactsgd {

/// Which information-feedback coefficient f_t to use in B_t = e_t S_t + f_t X_{t-1}.
enum class FeedbackRule {
    /// f_t = gamma / (theta (T-t+1)) * sum_{k=1..t} (t-k) rho^k, indexed forward
    /// from the first period.
    displayed,
    /// Exact solution of the dynamic program for this market: the same sum
    /// indexed by periods remaining n = T-t+1, with one extra power of rho
    /// because only X_{t-1} is known when B_t is chosen:
    /// f_t = gamma / (theta n) * sum_{k=1..n} (n-k) rho^(k+1).
    dynamic_programming,
};

struct PolicyCoefficients {
    std::vector<double> e;  ///< e[t-1] = 1/(T-t+1)
    std::vector<double> f;  ///< shares per information unit
};

/// Throws ParameterError when theta = 0 and gamma != 0 (f undefined).
PolicyCoefficients coefficients(const ExecutionProblem& problem, const MarketParams& params,
                                FeedbackRule rule = FeedbackRule::displayed);

/// e_t S_t + f_t X_{t-1} clipped to [0, S_t]; the final period returns S_T.
/// `t` is 1-based.
double optimal_order(std::size_t t, double remaining, double x_prev,
                     const PolicyCoefficients& coeffs);

Policy closed_form_policy(PolicyCoefficients coeffs);

struct OracleResult {
    Schedule schedule;
    double cost = 0.0;
    std::size_t evaluated = 0;  ///< number of grid schedules simulated
};

/// Exhaustive grid search over b_t in {0, step, 2 step, ...} with b_t <= S_t
/// and b_T = S_T, evaluated on one fixed noise path. Ties keep the first
/// schedule in lexicographic order. Limited to horizon <= 4 and at most 1e7
/// grid points.
OracleResult brute_force_oracle(const MarketParams& params, const ExecutionProblem& problem,
                                double grid_step, const NoisePath& noise);

}  // namespace impactsgd
