#include "impactsgd/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "impactsgd/errors.hpp"

namespace impactsgd {

namespace {

// sum_{k=1..m} (m-k) rho^(k+shift)
double lagged_weight_sum(std::size_t m, double rho, int shift) {
    double sum = 0.0;
    double power = std::pow(rho, shift);
    for (std::size_t k = 1; k <= m; ++k) {
        power *= rho;
        sum += static_cast<double>(m - k) * power;
    }
    return sum;
}

}  // namespace

PolicyCoefficients coefficients(const ExecutionProblem& problem, const MarketParams& params,
                                FeedbackRule rule) {
    problem.validate();
    const std::size_t T = problem.horizon;
    const bool informed = params.gamma != 0.0;
    if (informed && params.theta == 0.0) {
        throw ParameterError("theta must be > 0 when gamma != 0 (f_t divides by theta)");
    }
    const double ratio = informed ? params.gamma / params.theta : 0.0;

    PolicyCoefficients c;
    c.e.resize(T);
    c.f.assign(T, 0.0);
    for (std::size_t t = 1; t <= T; ++t) {
        const std::size_t left = T - t + 1;
        c.e[t - 1] = 1.0 / static_cast<double>(left);
        if (!informed) continue;
        const double sum = rule == FeedbackRule::displayed
                               ? lagged_weight_sum(t, params.rho, 0)
                               : lagged_weight_sum(left, params.rho, 1);
        c.f[t - 1] = ratio * sum / static_cast<double>(left);
    }
    return c;
}

double optimal_order(std::size_t t, double remaining, double x_prev,
                     const PolicyCoefficients& coeffs) {
    const std::size_t T = coeffs.e.size();
    if (t < 1 || t > T) {
        throw DimensionError("period " + std::to_string(t) + " outside 1.." +
                             std::to_string(T));
    }
    if (t == T) return remaining;
    const double raw = coeffs.e[t - 1] * remaining + coeffs.f[t - 1] * x_prev;
    return std::clamp(raw, 0.0, std::max(remaining, 0.0));
}

Policy closed_form_policy(PolicyCoefficients coeffs) {
    return [c = std::move(coeffs)](std::size_t t, double remaining, double x_prev) {
        return optimal_order(t, remaining, x_prev, c);
    };
}

OracleResult brute_force_oracle(const MarketParams& params, const ExecutionProblem& problem,
                                double grid_step, const NoisePath& noise) {
    problem.validate();
    const std::size_t T = problem.horizon;
    if (T > 4) {
        throw ParameterError("brute_force_oracle requires horizon <= 4, got " +
                             std::to_string(T));
    }
    if (!(grid_step > 0.0)) throw ParameterError("grid_step must be > 0");
    // Small slack so that e.g. total/60 still yields 60 steps.
    const double ratio = problem.total_shares / grid_step;
    const auto steps = static_cast<long long>(std::floor(ratio * (1.0 + 1e-12)));
    if (std::pow(ratio, static_cast<double>(T - 1)) > 1e7) {
        throw ParameterError("brute_force_oracle grid too large: (total/grid)^(T-1) > 1e7");
    }

    OracleResult best;
    best.cost = INFINITY;
    Schedule candidate;
    candidate.shares.assign(T, 0.0);
    std::vector<long long> units(T - 1, 0);

    // Odometer over the first T-1 coordinates, in grid units.
    auto evaluate = [&]() {
        double left = problem.total_shares;
        for (std::size_t t = 0; t + 1 < T; ++t) {
            candidate.shares[t] = static_cast<double>(units[t]) * grid_step;
            left -= candidate.shares[t];
        }
        candidate.shares[T - 1] = std::max(left, 0.0);
        const double cost = simulate_schedule(params, problem, candidate, noise).cost;
        ++best.evaluated;
        if (cost < best.cost) {
            best.cost = cost;
            best.schedule = candidate;
        }
    };

    if (T == 1) {
        evaluate();
        return best;
    }
    const auto used = [&units] {
        long long sum = 0;
        for (long long u : units) sum += u;
        return sum;
    };
    while (true) {
        evaluate();
        bool advanced = false;
        for (std::size_t k = T - 1; k-- > 0;) {
            ++units[k];
            if (used() <= steps) {
                advanced = true;
                break;
            }
            units[k] = 0;
        }
        if (!advanced) return best;
    }
}

}  // namespace impactsgd
