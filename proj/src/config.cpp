#include "impactsgd/config.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <json.hpp>

#include "impactsgd/errors.hpp"

namespace impactsgd {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(OutputFormat f) noexcept {
    switch (f) {
        case OutputFormat::csv: return "csv";
        case OutputFormat::json: return "json";
        case OutputFormat::both: return "both";
    }
    return "both";
}

std::string_view to_string(FeedbackRule r) noexcept {
    return r == FeedbackRule::displayed ? "displayed" : "dynamic_programming";
}

namespace {

double as_real(const json& v, std::string_view key) {
    if (!v.is_number()) throw ConfigError("config key '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

std::uint64_t as_count(const json& v, std::string_view key) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError("config key '" + std::string(key) + "' must be a non-negative integer");
}

std::string as_text(const json& v, std::string_view key) {
    if (!v.is_string()) throw ConfigError("config key '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

using Setter = std::function<void(ExperimentConfig&, const json&)>;
using Getter = std::function<ordered_json(const ExperimentConfig&)>;

struct Field {
    std::string key;
    Setter set;
    Getter get;
};

#define REAL_FIELD(name, member)                                                     \
    Field {                                                                          \
        name, [](ExperimentConfig& c, const json& v) { c.member = as_real(v, name); }, \
            [](const ExperimentConfig& c) { return ordered_json(c.member); }         \
    }
#define COUNT_FIELD(name, member)                                                     \
    Field {                                                                           \
        name,                                                                         \
            [](ExperimentConfig& c, const json& v) {                                  \
                c.member = static_cast<decltype(c.member)>(as_count(v, name));        \
            },                                                                        \
            [](const ExperimentConfig& c) { return ordered_json(c.member); }          \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        REAL_FIELD("theta", market.theta),
        REAL_FIELD("gamma", market.gamma),
        REAL_FIELD("rho", market.rho),
        REAL_FIELD("sigma_eps", market.sigma_eps),
        REAL_FIELD("sigma_eta", market.sigma_eta),
        REAL_FIELD("p0", market.p0),
        REAL_FIELD("x0", market.x0),
        REAL_FIELD("total_shares", problem.total_shares),
        COUNT_FIELD("horizon", problem.horizon),
        REAL_FIELD("learning_rate", optimizer.learning_rate),
        REAL_FIELD("beta1", optimizer.beta1),
        REAL_FIELD("beta2", optimizer.beta2),
        COUNT_FIELD("max_iters", optimizer.max_iters),
        REAL_FIELD("numeric_eps", optimizer.numeric_eps),
        COUNT_FIELD("minibatch", optimizer.minibatch),
        COUNT_FIELD("window", optimizer.window),
        REAL_FIELD("hard_cap_factor", optimizer.hard_cap_factor),
        COUNT_FIELD("seed", seed),
        COUNT_FIELD("paths", paths),
        Field{"out", [](ExperimentConfig& c, const json& v) { c.out = as_text(v, "out"); },
              [](const ExperimentConfig& c) { return ordered_json(c.out); }},
        Field{"format",
              [](ExperimentConfig& c, const json& v) {
                  const auto s = as_text(v, "format");
                  if (s == "csv") c.format = OutputFormat::csv;
                  else if (s == "json") c.format = OutputFormat::json;
                  else if (s == "both") c.format = OutputFormat::both;
                  else throw ConfigError("format must be csv, json or both, got '" + s + "'");
              },
              [](const ExperimentConfig& c) { return ordered_json(to_string(c.format)); }},
        Field{"optimum_rule",
              [](ExperimentConfig& c, const json& v) {
                  const auto s = as_text(v, "optimum_rule");
                  if (s == "displayed") c.optimum_rule = FeedbackRule::displayed;
                  else if (s == "dynamic_programming") c.optimum_rule = FeedbackRule::dynamic_programming;
                  else throw ConfigError("optimum_rule must be displayed or dynamic_programming, got '" + s + "'");
              },
              [](const ExperimentConfig& c) { return ordered_json(to_string(c.optimum_rule)); }},
        Field{"strategy",
              [](ExperimentConfig& c, const json& v) { c.strategy = as_text(v, "strategy"); },
              [](const ExperimentConfig& c) { return ordered_json(c.strategy); }},
        Field{"variant",
              [](ExperimentConfig& c, const json& v) {
                  try {
                      c.variant = parse_variant(as_text(v, "variant"));
                  } catch (const ParameterError& e) {
                      throw ConfigError(e.what());
                  }
              },
              [](const ExperimentConfig& c) { return ordered_json(to_string(c.variant)); }},
        REAL_FIELD("oracle_grid_step", oracle_grid_step),
    };
    return table;
}

#undef REAL_FIELD
#undef COUNT_FIELD

const std::vector<std::string> optimizer_fields = {
    "learning_rate", "beta1",     "beta2",  "max_iters",
    "numeric_eps",   "minibatch", "window", "hard_cap_factor"};

bool is_count_field(std::string_view f) {
    return f == "max_iters" || f == "minibatch" || f == "window";
}

void set_override(ExperimentConfig& c, std::string_view key, const json& v) {
    const auto dot = key.find('.');
    const auto variant = key.substr(0, dot);
    const auto field = key.substr(dot + 1);
    try {
        (void)parse_variant(variant);
    } catch (const ParameterError&) {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
    bool known = false;
    for (const auto& f : optimizer_fields) known = known || f == field;
    if (!known) throw ConfigError("unknown config key '" + std::string(key) + "'");
    c.overrides[std::string(key)] = is_count_field(field)
                                        ? static_cast<double>(as_count(v, key))
                                        : as_real(v, key);
}

void set_json(ExperimentConfig& c, std::string_view key, const json& v) {
    if (v.is_object() || v.is_array()) {
        throw ConfigError("config key '" + std::string(key) + "' must be a scalar (flat config)");
    }
    if (key.find('.') != std::string_view::npos) {
        set_override(c, key, v);
        return;
    }
    for (const auto& f : fields()) {
        if (f.key == key) {
            f.set(c, v);
            return;
        }
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_to_optimizer(OptimizerConfig& o, std::string_view field, double v) {
    if (field == "learning_rate") o.learning_rate = v;
    else if (field == "beta1") o.beta1 = v;
    else if (field == "beta2") o.beta2 = v;
    else if (field == "max_iters") o.max_iters = static_cast<std::size_t>(v);
    else if (field == "numeric_eps") o.numeric_eps = v;
    else if (field == "minibatch") o.minibatch = static_cast<std::size_t>(v);
    else if (field == "window") o.window = static_cast<std::size_t>(v);
    else if (field == "hard_cap_factor") o.hard_cap_factor = v;
}

}  // namespace

OptimizerConfig ExperimentConfig::optimizer_for(Variant v) const {
    OptimizerConfig o = optimizer;
    const std::string prefix = std::string(to_string(v)) + ".";
    for (const auto& [key, value] : overrides) {
        if (key.starts_with(prefix)) apply_to_optimizer(o, std::string_view(key).substr(prefix.size()), value);
    }
    return o;
}

void ExperimentConfig::validate() const {
    try {
        market.validate();
        problem.validate();
        optimizer.validate();
        for (Variant v : all_variants) {
            try {
                optimizer_for(v).validate();
            } catch (const ParameterError& e) {
                throw ParameterError(std::string(to_string(v)) + "." + e.what());
            }
        }
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (paths < 1) throw ConfigError("paths must be >= 1");
    if (out.empty()) throw ConfigError("out must be a non-empty directory path");
    if (!(oracle_grid_step >= 0.0)) throw ConfigError("oracle_grid_step must be >= 0");
    if (strategy != "optimum" && strategy != "uniform") {
        try {
            (void)parse_variant(strategy);
        } catch (const ParameterError&) {
            throw ConfigError("strategy must be optimum, uniform, adagrad, rmsprop, adam or custom, got '" +
                              strategy + "'");
        }
    }
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error&) {
        v = std::string(value);
    }
    set_json(config, key, v);
}

ExperimentConfig parse_config(std::string_view text) { return parse_config(text, {}); }

ExperimentConfig parse_config(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& flags) {
    ExperimentConfig config;
    bool blank = true;
    for (char ch : text) blank = blank && std::isspace(static_cast<unsigned char>(ch));
    if (!blank) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw ConfigError("config must be a flat JSON object");
        for (const auto& [key, value] : doc.items()) set_json(config, key, value);
    }
    for (const auto& [key, value] : flags) apply_setting(config, key, value);
    config.validate();
    return config;
}

std::string emit_config(const ExperimentConfig& config) {
    ordered_json doc = ordered_json::object();
    for (const auto& f : fields()) doc[f.key] = f.get(config);
    for (const auto& [key, value] : config.overrides) {
        const auto field = std::string_view(key).substr(key.find('.') + 1);
        if (is_count_field(field)) {
            doc[key] = static_cast<std::uint64_t>(value);
        } else {
            doc[key] = value;
        }
    }
    return doc.dump(2) + "\n";
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

}  // namespace impactsgd
