#include "impactsgd/sgd_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impactsgd/errors.hpp"

namespace impactsgd {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                             " vs " + std::to_string(b));
    }
}

struct CostAndGradient {
    double cost = 0.0;
    std::vector<double> grad;
};

CostAndGradient evaluate(const MarketParams& params, const ExecutionProblem& problem,
                         const Schedule& schedule, const NoisePath& noise) {
    const auto path = simulate_schedule(params, problem, schedule, noise);
    const std::size_t T = schedule.size();
    CostAndGradient out{path.cost, std::vector<double>(T)};
    double tail = 0.0;
    for (std::size_t t = T; t-- > 0;) {
        tail += schedule.shares[t];
        out.grad[t] = path.prices[t] + params.theta * tail;
    }
    return out;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::adagrad: return "adagrad";
        case Variant::rmsprop: return "rmsprop";
        case Variant::adam: return "adam";
        case Variant::custom: return "custom";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    for (Variant v : all_variants) {
        if (to_string(v) == name) return v;
    }
    throw ParameterError("unknown optimizer variant '" + std::string(name) +
                         "' (expected adagrad, rmsprop, adam or custom)");
}

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be > 0");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw ParameterError("beta1 must lie in (0, 1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw ParameterError("beta2 must lie in (0, 1)");
    if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
    if (!(numeric_eps > 0.0)) throw ParameterError("numeric_eps must be > 0");
    if (minibatch < 1) throw ParameterError("minibatch must be >= 1");
    if (window < 1) throw ParameterError("window must be >= 1");
    if (!(hard_cap_factor >= 1.0)) throw ParameterError("hard_cap_factor must be >= 1");
}

OptimizerState OptimizerState::start(const Schedule& initial, const OptimizerConfig& config) {
    const std::size_t T = initial.size();
    OptimizerState s;
    s.iterate = initial.shares;
    s.accum_sq.assign(T, 0.0);
    s.moment1.assign(T, 0.0);
    s.moment2.assign(T, 0.0);
    s.lr_current = config.learning_rate;
    s.budget_current = static_cast<double>(config.max_iters);
    return s;
}

std::vector<double> cost_gradient(const MarketParams& params, const ExecutionProblem& problem,
                                  const Schedule& schedule, const NoisePath& noise) {
    return evaluate(params, problem, schedule, noise).grad;
}

Schedule project_box(const Schedule& schedule, double total_shares) {
    Schedule out = schedule;
    double left = total_shares;
    for (double& b : out.shares) {
        b = std::clamp(b, 0.0, left);
        left -= b;
    }
    return out;
}

Schedule project_budget(const Schedule& schedule, double total_shares) {
    Schedule out = schedule;
    const double sum = schedule.total();
    if (!(sum > 0.0)) {
        std::fill(out.shares.begin(), out.shares.end(),
                  total_shares / static_cast<double>(out.size()));
        return out;
    }
    const double scale = total_shares / sum;
    for (double& b : out.shares) b *= scale;
    return out;
}

void step_adagrad(OptimizerState& state, std::span<const double> grad,
                  const OptimizerConfig& config) {
    require_same(grad.size(), state.iterate.size(), "gradient");
    ++state.iteration;
    for (std::size_t t = 0; t < grad.size(); ++t) {
        state.accum_sq[t] += grad[t] * grad[t];
        state.iterate[t] -=
            config.learning_rate * grad[t] / std::sqrt(state.accum_sq[t] + config.numeric_eps);
    }
}

void step_rmsprop(OptimizerState& state, std::span<const double> grad,
                  const OptimizerConfig& config) {
    require_same(grad.size(), state.iterate.size(), "gradient");
    ++state.iteration;
    const double decay = config.beta1;
    for (std::size_t t = 0; t < grad.size(); ++t) {
        state.accum_sq[t] = decay * state.accum_sq[t] + (1.0 - decay) * grad[t] * grad[t];
        state.iterate[t] -=
            config.learning_rate * grad[t] / std::sqrt(state.accum_sq[t] + config.numeric_eps);
    }
}

void step_adam(OptimizerState& state, std::span<const double> grad,
               const OptimizerConfig& config) {
    require_same(grad.size(), state.iterate.size(), "gradient");
    ++state.iteration;
    const double i = static_cast<double>(state.iteration);
    const double correct1 = 1.0 - std::pow(config.beta1, i);
    const double correct2 = 1.0 - std::pow(config.beta2, i);
    for (std::size_t t = 0; t < grad.size(); ++t) {
        state.moment1[t] = config.beta1 * state.moment1[t] + (1.0 - config.beta1) * grad[t];
        state.moment2[t] =
            config.beta2 * state.moment2[t] + (1.0 - config.beta2) * grad[t] * grad[t];
        const double m_hat = state.moment1[t] / correct1;
        const double v_hat = state.moment2[t] / correct2;
        state.iterate[t] -= config.learning_rate * m_hat / std::sqrt(v_hat + config.numeric_eps);
    }
}

std::size_t step_custom(OptimizerState& state, std::span<const double> grad,
                        const OptimizerConfig& config, double total_shares) {
    const std::size_t T = state.iterate.size();
    require_same(grad.size(), T, "gradient");
    ++state.iteration;

    // Linearly weighted (oldest = 1) average of the trailing norms.
    double weighted = 0.0;
    double weights = 0.0;
    double w = 1.0;
    for (const auto& entry : state.norm_history) {
        double sq = 0.0;
        for (double c : entry) sq += c;
        weighted += w * std::sqrt(sq);
        weights += w;
        w += 1.0;
    }
    const double current = norm2(grad);
    const double budget = state.budget_current;
    if (weights > 0.0 && weighted / weights >= current) {
        state.lr_current += 2.0 / budget;
        state.budget_current += 0.5 / budget;
    } else {
        state.lr_current += 0.5 / budget;
        state.budget_current += 2.0 / budget;
    }

    for (std::size_t t = 0; t < T; ++t) state.iterate[t] -= state.lr_current * grad[t];

    std::vector<double> entry(T);
    for (std::size_t t = 0; t < T; ++t) entry[t] = grad[t] * grad[t];

    std::size_t resets = 0;
    double left = total_shares;
    for (std::size_t t = 0; t < T; ++t) {
        double& b = state.iterate[t];
        if (b < 0.0 || b > left) {
            b = left / static_cast<double>(T - t);
            entry[t] = 0.0;
            for (auto& past : state.norm_history) past[t] = 0.0;
            ++resets;
        }
        left -= b;
    }

    state.norm_history.push_back(std::move(entry));
    while (state.norm_history.size() > config.window) state.norm_history.pop_front();
    return resets;
}

OptimizationResult run_optimizer(Variant variant, const OptimizerConfig& config,
                                 const MarketParams& params, const ExecutionProblem& problem,
                                 RandomSource& rng, const IterationObserver& observer) {
    config.validate();
    params.validate();
    problem.validate();
    const std::size_t T = problem.horizon;
    const double total = problem.total_shares;

    Schedule uniform;
    uniform.shares.assign(T, total / static_cast<double>(T));
    auto state = OptimizerState::start(uniform, config);

    const auto hard_cap = static_cast<std::size_t>(
        std::floor(config.hard_cap_factor * static_cast<double>(config.max_iters)));
    auto bound = [&]() -> std::size_t {
        if (variant != Variant::custom) return config.max_iters;
        const auto live = static_cast<std::size_t>(std::floor(state.budget_current));
        return std::min(live, hard_cap);
    };

    OptimizationResult result;
    result.trace.reserve(config.max_iters);
    std::vector<double> grad(T);
    Schedule current;
    const double batch = static_cast<double>(config.minibatch);

    while (state.iteration < bound()) {
        current.shares = state.iterate;
        std::fill(grad.begin(), grad.end(), 0.0);
        double objective = 0.0;
        for (std::size_t m = 0; m < config.minibatch; ++m) {
            const auto noise = sample_noise(rng, T, params.sigma_eps, params.sigma_eta);
            const auto eval = evaluate(params, problem, current, noise);
            objective += eval.cost;
            for (std::size_t t = 0; t < T; ++t) grad[t] += eval.grad[t];
        }
        objective /= batch;
        for (double& g : grad) g /= batch;
        if (variant == Variant::custom) {
            // The unnormalized custom step only sees the component of the
            // gradient tangent to the budget surface sum b = total.
            double mean = 0.0;
            for (double g : grad) mean += g;
            mean /= static_cast<double>(T);
            for (double& g : grad) g -= mean;
        }

        TraceRecord record{state.iteration + 1, objective, norm2(grad), config.learning_rate};
        Schedule next;
        switch (variant) {
            case Variant::adagrad: step_adagrad(state, grad, config); break;
            case Variant::rmsprop: step_rmsprop(state, grad, config); break;
            case Variant::adam: step_adam(state, grad, config); break;
            case Variant::custom:
                step_custom(state, grad, config, total);
                record.learning_rate = state.lr_current;
                break;
        }
        next.shares = std::move(state.iterate);
        if (variant != Variant::custom) next = project_box(next, total);
        state.iterate = project_budget(next, total).shares;

        result.trace.push_back(record);
        if (observer) observer(state);
    }

    result.schedule.shares = state.iterate;
    return result;
}

}  // namespace impactsgd
