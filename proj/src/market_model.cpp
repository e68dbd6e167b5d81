#include "impactsgd/market_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "impactsgd/errors.hpp"

namespace impactsgd {

namespace {

void require_horizon(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + " has length " + std::to_string(got) +
                             ", expected horizon " + std::to_string(want));
    }
}

void check_rho(double rho) {
    if (!(std::abs(rho) < 1.0)) {
        throw ParameterError("rho must satisfy |rho| < 1, got " + std::to_string(rho));
    }
}

}  // namespace

void MarketParams::validate() const {
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw ParameterError("theta must be finite and >= 0, got " + std::to_string(theta));
    }
    if (!std::isfinite(gamma)) throw ParameterError("gamma must be finite");
    check_rho(rho);
    if (!(sigma_eps >= 0.0) || !std::isfinite(sigma_eps)) {
        throw ParameterError("sigma_eps must be finite and >= 0, got " +
                             std::to_string(sigma_eps));
    }
    if (!(sigma_eta >= 0.0) || !std::isfinite(sigma_eta)) {
        throw ParameterError("sigma_eta must be finite and >= 0, got " +
                             std::to_string(sigma_eta));
    }
    if (!std::isfinite(p0)) throw ParameterError("p0 must be finite");
    if (!std::isfinite(x0)) throw ParameterError("x0 must be finite");
}

void ExecutionProblem::validate() const {
    if (!(total_shares > 0.0) || !std::isfinite(total_shares)) {
        throw ParameterError("total_shares must be finite and > 0, got " +
                             std::to_string(total_shares));
    }
    if (horizon < 1) throw ParameterError("horizon must be >= 1");
}

std::uint64_t NoisePath::checksum() const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto feed = [&h](double v) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xFFU;
            h *= 0x100000001B3ULL;
        }
    };
    for (double v : eps) feed(v);
    feed(0.0);
    for (double v : eta) feed(v);
    return h;
}

double Schedule::total() const noexcept {
    return std::accumulate(shares.begin(), shares.end(), 0.0);
}

bool is_feasible(const Schedule& schedule, const ExecutionProblem& problem, double rel_tol) {
    if (schedule.size() != problem.horizon) return false;
    for (double b : schedule.shares) {
        if (!(b >= 0.0)) return false;
    }
    return std::abs(schedule.total() - problem.total_shares) <=
           rel_tol * problem.total_shares;
}

NoisePath sample_noise(RandomSource& rng, std::size_t horizon, double sigma_eps,
                       double sigma_eta) {
    if (!(sigma_eps >= 0.0) || !(sigma_eta >= 0.0)) {
        throw ParameterError("noise standard deviations must be >= 0");
    }
    NoisePath path;
    path.eps.resize(horizon);
    path.eta.resize(horizon);
    for (auto& v : path.eps) v = rng.gaussian(sigma_eps);
    for (auto& v : path.eta) v = rng.gaussian(sigma_eta);
    return path;
}

std::vector<double> propagate_info(double x0, double rho, std::span<const double> eta) {
    check_rho(rho);
    std::vector<double> info(eta.size() + 1);
    info[0] = x0;
    for (std::size_t t = 0; t < eta.size(); ++t) info[t + 1] = rho * info[t] + eta[t];
    return info;
}

PathOutcome simulate_schedule(const MarketParams& params, const ExecutionProblem& problem,
                              const Schedule& schedule, const NoisePath& noise) {
    const std::size_t T = problem.horizon;
    require_horizon(schedule.size(), T, "schedule");
    require_horizon(noise.eps.size(), T, "eps");
    require_horizon(noise.eta.size(), T, "eta");

    PathOutcome out;
    out.info = propagate_info(params.x0, params.rho, noise.eta);
    out.prices.resize(T);
    out.remaining.resize(T + 1);
    out.remaining[0] = problem.total_shares;

    double price = params.p0;
    for (std::size_t t = 0; t < T; ++t) {
        const double b = schedule.shares[t];
        price += params.theta * b + params.gamma * out.info[t + 1] + noise.eps[t];
        out.prices[t] = price;
        out.cost += price * b;
        out.remaining[t + 1] = out.remaining[t] - b;
    }
    return out;
}

PolicyRun simulate_policy(const MarketParams& params, const ExecutionProblem& problem,
                          const Policy& policy, const NoisePath& noise) {
    const std::size_t T = problem.horizon;
    require_horizon(noise.eps.size(), T, "eps");
    require_horizon(noise.eta.size(), T, "eta");

    PolicyRun run;
    auto& out = run.outcome;
    run.schedule.shares.resize(T);
    out.info = propagate_info(params.x0, params.rho, noise.eta);
    out.prices.resize(T);
    out.remaining.resize(T + 1);
    out.remaining[0] = problem.total_shares;

    double price = params.p0;
    for (std::size_t t = 0; t < T; ++t) {
        const double left = out.remaining[t];
        double b;
        if (t + 1 == T) {
            b = left;
        } else {
            b = policy(t + 1, left, out.info[t]);
            if (!std::isfinite(b)) {
                throw ParameterError("policy returned a non-finite order at period " +
                                     std::to_string(t + 1));
            }
            b = std::clamp(b, 0.0, left);
        }
        run.schedule.shares[t] = b;
        price += params.theta * b + params.gamma * out.info[t + 1] + noise.eps[t];
        out.prices[t] = price;
        out.cost += price * b;
        out.remaining[t + 1] = left - b;
    }
    return run;
}

}  // namespace impactsgd
