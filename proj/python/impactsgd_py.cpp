#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "impactsgd/benchmark.hpp"
#include "impactsgd/closed_form.hpp"
#include "impactsgd/config.hpp"
#include "impactsgd/errors.hpp"
#include "impactsgd/experiment.hpp"
#include "impactsgd/market_model.hpp"
#include "impactsgd/sgd_engine.hpp"

namespace py = pybind11;
using namespace impactsgd;

namespace {

using PlanArg = std::variant<Schedule, PolicyCoefficients, Policy>;

Strategy to_strategy(const std::string& name, const PlanArg& plan) {
    if (const auto* s = std::get_if<Schedule>(&plan)) return {name, *s};
    if (const auto* c = std::get_if<PolicyCoefficients>(&plan)) return {name, closed_form_policy(*c)};
    return {name, std::get<Policy>(plan)};
}

template <class T>
std::string repr_fields(const char* type, const T& fields) {
    std::string out = std::string(type) + "(";
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out += (i ? ", " : "") + fields[i].first + "=" + format_number(fields[i].second);
    }
    return out + ")";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal execution with permanent price impact: market model, closed form, projected SGD";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<MarketParams>(m, "MarketParams")
        .def(py::init<>())
        .def(py::init([](double theta, double gamma, double rho, double sigma_eps, double sigma_eta,
                         double p0, double x0) {
                 MarketParams p{theta, gamma, rho, sigma_eps, sigma_eta, p0, x0};
                 p.validate();
                 return p;
             }),
             py::kw_only(), py::arg("theta") = 5e-5, py::arg("gamma") = 5e-2, py::arg("rho") = 0.5,
             py::arg("sigma_eps") = 0.125, py::arg("sigma_eta") = 1.0, py::arg("p0") = 50.0,
             py::arg("x0") = 0.0)
        .def_readwrite("theta", &MarketParams::theta)
        .def_readwrite("gamma", &MarketParams::gamma)
        .def_readwrite("rho", &MarketParams::rho)
        .def_readwrite("sigma_eps", &MarketParams::sigma_eps)
        .def_readwrite("sigma_eta", &MarketParams::sigma_eta)
        .def_readwrite("p0", &MarketParams::p0)
        .def_readwrite("x0", &MarketParams::x0)
        .def("validate", &MarketParams::validate)
        .def(py::self == py::self)
        .def("__repr__", [](const MarketParams& p) {
            return repr_fields("MarketParams",
                               std::vector<std::pair<std::string, double>>{
                                   {"theta", p.theta}, {"gamma", p.gamma}, {"rho", p.rho},
                                   {"sigma_eps", p.sigma_eps}, {"sigma_eta", p.sigma_eta},
                                   {"p0", p.p0}, {"x0", p.x0}});
        });

    py::class_<ExecutionProblem>(m, "ExecutionProblem")
        .def(py::init([](double total_shares, std::size_t horizon) {
                 ExecutionProblem p{total_shares, horizon};
                 p.validate();
                 return p;
             }),
             py::arg("total_shares") = 100000.0, py::arg("horizon") = 20)
        .def_readwrite("total_shares", &ExecutionProblem::total_shares)
        .def_readwrite("horizon", &ExecutionProblem::horizon)
        .def(py::self == py::self);

    py::class_<RandomSource>(m, "RandomSource")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &RandomSource::uniform)
        .def("gaussian", py::overload_cast<>(&RandomSource::gaussian));

    py::class_<NoisePath>(m, "NoisePath")
        .def(py::init<>())
        .def(py::init([](std::vector<double> eps, std::vector<double> eta) {
                 if (eps.size() != eta.size()) throw DimensionError("eps and eta lengths differ");
                 return NoisePath{std::move(eps), std::move(eta)};
             }),
             py::arg("eps"), py::arg("eta"))
        .def_readwrite("eps", &NoisePath::eps)
        .def_readwrite("eta", &NoisePath::eta)
        .def_property_readonly("horizon", &NoisePath::horizon)
        .def("checksum", &NoisePath::checksum);

    py::class_<Schedule>(m, "Schedule")
        .def(py::init([](std::vector<double> shares) { return Schedule{std::move(shares)}; }),
             py::arg("shares"))
        .def_readwrite("shares", &Schedule::shares)
        .def("total", &Schedule::total)
        .def("__len__", &Schedule::size)
        .def(py::self == py::self)
        .def("__repr__", [](const Schedule& s) {
            std::string out = "Schedule([";
            for (std::size_t i = 0; i < s.shares.size(); ++i) {
                out += (i ? ", " : "") + format_number(s.shares[i]);
            }
            return out + "])";
        });
    py::implicitly_convertible<std::vector<double>, Schedule>();

    py::class_<PathOutcome>(m, "PathOutcome")
        .def_readonly("prices", &PathOutcome::prices)
        .def_readonly("info", &PathOutcome::info)
        .def_readonly("remaining", &PathOutcome::remaining)
        .def_readonly("cost", &PathOutcome::cost);

    py::class_<PolicyRun>(m, "PolicyRun")
        .def_readonly("schedule", &PolicyRun::schedule)
        .def_readonly("outcome", &PolicyRun::outcome);

    m.def("is_feasible", &is_feasible, py::arg("schedule"), py::arg("problem"),
          py::arg("rel_tol") = 1e-9);
    m.def("sample_noise", &sample_noise, py::arg("rng"), py::arg("horizon"), py::arg("sigma_eps"),
          py::arg("sigma_eta"));
    m.def(
        "propagate_info",
        [](double x0, double rho, const std::vector<double>& eta) {
            return propagate_info(x0, rho, eta);
        },
        py::arg("x0"), py::arg("rho"), py::arg("eta"));
    m.def("simulate_schedule", &simulate_schedule, py::arg("params"), py::arg("problem"),
          py::arg("schedule"), py::arg("noise"));
    m.def("simulate_policy", &simulate_policy, py::arg("params"), py::arg("problem"),
          py::arg("policy"), py::arg("noise"));

    py::enum_<FeedbackRule>(m, "FeedbackRule")
        .value("displayed", FeedbackRule::displayed)
        .value("dynamic_programming", FeedbackRule::dynamic_programming);

    py::class_<PolicyCoefficients>(m, "PolicyCoefficients")
        .def_readonly("e", &PolicyCoefficients::e)
        .def_readonly("f", &PolicyCoefficients::f)
        .def("policy", [](const PolicyCoefficients& c) { return closed_form_policy(c); });

    py::class_<OracleResult>(m, "OracleResult")
        .def_readonly("schedule", &OracleResult::schedule)
        .def_readonly("cost", &OracleResult::cost)
        .def_readonly("evaluated", &OracleResult::evaluated);

    m.def("coefficients", &coefficients, py::arg("problem"), py::arg("params"),
          py::arg("rule") = FeedbackRule::displayed);
    m.def("optimal_order", &optimal_order, py::arg("t"), py::arg("remaining"), py::arg("x_prev"),
          py::arg("coeffs"));
    m.def("brute_force_oracle", &brute_force_oracle, py::arg("params"), py::arg("problem"),
          py::arg("grid_step"), py::arg("noise"));

    py::enum_<Variant>(m, "Variant")
        .value("adagrad", Variant::adagrad)
        .value("rmsprop", Variant::rmsprop)
        .value("adam", Variant::adam)
        .value("custom", Variant::custom);

    py::class_<OptimizerConfig>(m, "OptimizerConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &OptimizerConfig::learning_rate)
        .def_readwrite("beta1", &OptimizerConfig::beta1)
        .def_readwrite("beta2", &OptimizerConfig::beta2)
        .def_readwrite("max_iters", &OptimizerConfig::max_iters)
        .def_readwrite("numeric_eps", &OptimizerConfig::numeric_eps)
        .def_readwrite("minibatch", &OptimizerConfig::minibatch)
        .def_readwrite("window", &OptimizerConfig::window)
        .def_readwrite("hard_cap_factor", &OptimizerConfig::hard_cap_factor)
        .def("validate", &OptimizerConfig::validate);

    py::class_<TraceRecord>(m, "TraceRecord")
        .def_readonly("iteration", &TraceRecord::iteration)
        .def_readonly("objective", &TraceRecord::objective)
        .def_readonly("grad_norm", &TraceRecord::grad_norm)
        .def_readonly("learning_rate", &TraceRecord::learning_rate);

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("schedule", &OptimizationResult::schedule)
        .def_readonly("trace", &OptimizationResult::trace);

    m.def(
        "cost_gradient",
        [](const MarketParams& p, const ExecutionProblem& prob, const Schedule& s,
           const NoisePath& n) { return cost_gradient(p, prob, s, n); },
        py::arg("params"), py::arg("problem"), py::arg("schedule"), py::arg("noise"));
    m.def("project_box", &project_box, py::arg("schedule"), py::arg("total_shares"));
    m.def("project_budget", &project_budget, py::arg("schedule"), py::arg("total_shares"));
    m.def(
        "run_optimizer",
        [](Variant v, const OptimizerConfig& cfg, const MarketParams& p,
           const ExecutionProblem& prob, std::uint64_t seed) {
            RandomSource rng(seed);
            py::gil_scoped_release release;
            return run_optimizer(v, cfg, p, prob, rng);
        },
        py::arg("variant"), py::arg("config"), py::arg("params"), py::arg("problem"),
        py::arg("seed"));

    py::class_<CostMatrix>(m, "CostMatrix")
        .def_readonly("names", &CostMatrix::names)
        .def_readonly("cost", &CostMatrix::cost)
        .def_readonly("checksum", &CostMatrix::checksum)
        .def_readonly("realized", &CostMatrix::realized)
        .def("is_paired", [](const CostMatrix& c) { return is_paired(c); });

    py::class_<StrategyReport>(m, "StrategyReport")
        .def_readonly("name", &StrategyReport::name)
        .def_readonly("cost", &StrategyReport::cost)
        .def_readonly("excess_per_share", &StrategyReport::excess_per_share)
        .def_readonly("std_within_path", &StrategyReport::std_within_path)
        .def_readonly("std_across_paths_total", &StrategyReport::std_across_paths_total)
        .def_readonly("rank", &StrategyReport::rank);

    m.def(
        "evaluate_common",
        [](const std::vector<std::pair<std::string, PlanArg>>& plans, const MarketParams& p,
           const ExecutionProblem& prob, const std::vector<NoisePath>& paths) {
            std::vector<Strategy> strategies;
            for (const auto& [name, plan] : plans) strategies.push_back(to_strategy(name, plan));
            return evaluate_common(strategies, p, prob, paths);
        },
        py::arg("strategies"), py::arg("params"), py::arg("problem"), py::arg("paths"),
        "strategies: list of (name, Schedule | PolicyCoefficients | callable(t, remaining, x_prev))");
    m.def("metrics", &metrics, py::arg("matrix"), py::arg("optimum_name"), py::arg("total_shares"));
    m.def("rank_report", &rank_report, py::arg("reports"));

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("market", &ExperimentConfig::market)
        .def_readwrite("problem", &ExperimentConfig::problem)
        .def_readwrite("optimizer", &ExperimentConfig::optimizer)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("paths", &ExperimentConfig::paths)
        .def_readwrite("out", &ExperimentConfig::out)
        .def_readwrite("optimum_rule", &ExperimentConfig::optimum_rule)
        .def("optimizer_for", &ExperimentConfig::optimizer_for, py::arg("variant"))
        .def("validate", &ExperimentConfig::validate)
        .def("to_json", [](const ExperimentConfig& c) { return emit_config(c); })
        .def(py::self == py::self);

    m.def(
        "parse_config",
        [](const std::string& text, const std::vector<std::pair<std::string, std::string>>& flags) {
            return parse_config(text, flags);
        },
        py::arg("text") = "", py::arg("overrides") = std::vector<std::pair<std::string, std::string>>{});
    m.def("config_keys", &config_keys);

    py::class_<BenchmarkResult>(m, "BenchmarkResult")
        .def_readonly("reports", &BenchmarkResult::reports)
        .def_readonly("schedules", &BenchmarkResult::schedules)
        .def_readonly("traces", &BenchmarkResult::traces)
        .def_readonly("matrix", &BenchmarkResult::matrix);

    m.def(
        "run_benchmark",
        [](const ExperimentConfig& c) {
            py::gil_scoped_release release;
            return run_benchmark(c);
        },
        py::arg("config"));
    m.def("run_benchmark_command", &run_benchmark_command, py::arg("config"),
          "Run the benchmark and write its artifacts into config.out.");
}
