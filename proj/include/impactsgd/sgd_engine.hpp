#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "impactsgd/market_model.hpp"
#include "impactsgd/random.hpp"

namespace impactsgd {

enum class Variant { adagrad, rmsprop, adam, custom };

inline constexpr Variant all_variants[] = {Variant::adagrad, Variant::rmsprop, Variant::adam,
                                           Variant::custom};

std::string_view to_string(Variant v) noexcept;
/// Throws ParameterError for unknown names.
Variant parse_variant(std::string_view name);

struct OptimizerConfig {
    double learning_rate = 0.025;
    double beta1 = 0.98;
    double beta2 = 0.99;
    std::size_t max_iters = 10000;
    double numeric_eps = 1e-8;     ///< guard inside the square root
    std::size_t minibatch = 1;     ///< noise paths averaged per gradient
    std::size_t window = 10;       ///< custom: trailing gradient norms
    double hard_cap_factor = 10.0; ///< custom: never exceed factor * max_iters

    void validate() const;

    bool operator==(const OptimizerConfig&) const = default;
};

struct OptimizerState {
    std::vector<double> iterate;
    std::vector<double> accum_sq;  ///< AdaGrad sum / RMSprop decayed mean of g^2
    std::vector<double> moment1;   ///< Adam
    std::vector<double> moment2;   ///< Adam
    std::size_t iteration = 0;     ///< completed steps
    double lr_current = 0.0;       ///< custom
    double budget_current = 0.0;   ///< custom, real-valued iteration bound
    /// custom: squared gradient components of up to `window` past iterations,
    /// oldest first. A coordinate that is reset is zeroed in every entry.
    std::deque<std::vector<double>> norm_history;

    static OptimizerState start(const Schedule& initial, const OptimizerConfig& config);
};

struct TraceRecord {
    std::size_t iteration = 0;
    double objective = 0.0;      ///< mean minibatch cost at the pre-step iterate
    double grad_norm = 0.0;
    double learning_rate = 0.0;  ///< step size in effect for this iteration

    bool operator==(const TraceRecord&) const = default;
};

using ConvergenceTrace = std::vector<TraceRecord>;

/// Exact pathwise derivative of sum_t P_t b_t with the noise held fixed:
/// g_t = P_t + theta * sum_{k >= t} b_k.
std::vector<double> cost_gradient(const MarketParams& params, const ExecutionProblem& problem,
                                  const Schedule& schedule, const NoisePath& noise);

/// Forward sweep: b_t is clipped into [0, S_t] with S_t = total - sum_{k<t} b_k
/// taken over the already-clipped prefix.
Schedule project_box(const Schedule& schedule, double total_shares);

/// Multiplicative rescale onto sum b = total. A zero-sum input maps to the
/// uniform split.
Schedule project_budget(const Schedule& schedule, double total_shares);

void step_adagrad(OptimizerState& state, std::span<const double> grad,
                  const OptimizerConfig& config);
void step_rmsprop(OptimizerState& state, std::span<const double> grad,
                  const OptimizerConfig& config);
void step_adam(OptimizerState& state, std::span<const double> grad,
               const OptimizerConfig& config);

/// Adaptive learning rate and iteration budget, plain gradient step, then the
/// reset rule: a coordinate leaving [0, S_t] becomes S_t / (T-t+1).
/// Returns the number of coordinates reset.
std::size_t step_custom(OptimizerState& state, std::span<const double> grad,
                        const OptimizerConfig& config, double total_shares);

struct OptimizationResult {
    Schedule schedule;
    ConvergenceTrace trace;
};

/// Called after every completed iteration with the projected state.
using IterationObserver = std::function<void(const OptimizerState&)>;

/// Projected SGD from the uniform split. Every iteration draws
/// `config.minibatch` fresh noise paths from `rng` and averages their
/// gradients. AdaGrad, RMSprop and Adam step on the full gradient and are
/// followed by project_box and project_budget. Custom steps on the gradient
/// with its mean removed, applies its own reset rule, then project_budget.
OptimizationResult run_optimizer(Variant variant, const OptimizerConfig& config,
                                 const MarketParams& params, const ExecutionProblem& problem,
                                 RandomSource& rng, const IterationObserver& observer = {});

}  // namespace impactsgd
