#pragma once

// YAML run configuration. Four flat sections; every key is optional and
// unknown keys are errors.
//
//   domain:   dimension, K, collocation
//   noise:    alpha, lambda (power_law | list), c, beta, weights, gamma
//   dynamics: epsilon, theta, nonlinearity (zero | diagonal | sine),
//             nonlinearity_c, growth_exponent,
//             u0, u0_mode, u0_amplitude, u0_exponent (same for v0)
//   run:      T, N, seed, stride, replications, workers

#include "sklimit/config.hpp"
#include "sklimit/harness/digest.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sklimit::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string where(const std::string& source, const YAML::Node& node) {
    const auto m = node.Mark();
    if (m.line < 0) return source;
    return fmt::format("{}:{}:{}", source, m.line + 1, m.column + 1);
}

template <class T>
T scalar(const std::string& source, const std::string& field, const YAML::Node& node) {
    if (!node.IsScalar()) throw ConfigError(fmt::format("{}: {} must be a scalar", where(source, node), field));
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(fmt::format("{}: {} has an invalid value '{}'", where(source, node), field,
                                      node.Scalar()));
    }
}

inline std::size_t count(const std::string& source, const std::string& field, const YAML::Node& node) {
    const auto v = scalar<long long>(source, field, node);
    if (v < 0) throw ConfigError(fmt::format("{}: {} must be nonnegative", where(source, node), field));
    return static_cast<std::size_t>(v);
}

template <class E>
E choice(const std::string& source, const std::string& field, const YAML::Node& node,
         const std::map<std::string, E>& options) {
    const auto s = scalar<std::string>(source, field, node);
    const auto it = options.find(s);
    if (it == options.end()) {
        std::string names;
        for (const auto& [k, v] : options) names += (names.empty() ? "" : ", ") + k;
        throw ConfigError(fmt::format("{}: {} must be one of {}, got '{}'", where(source, node), field, names, s));
    }
    return it->second;
}

using Setter = std::function<void(const YAML::Node&)>;

inline const std::map<std::string, InitialKind> initial_kinds{
    {"zero", InitialKind::zero}, {"single_mode", InitialKind::single_mode}, {"power_law", InitialKind::power_law}};

inline void add_initial(std::map<std::string, Setter>& keys, const std::string& source, const std::string& name,
                        InitialData& data) {
    const std::string f = "dynamics." + name;
    keys[name] = [&, f](const YAML::Node& n) { data.kind = choice(source, f, n, initial_kinds); };
    keys[name + "_mode"] = [&, f](const YAML::Node& n) { data.mode = count(source, f + "_mode", n); };
    keys[name + "_amplitude"] = [&, f](const YAML::Node& n) { data.amplitude = scalar<double>(source, f + "_amplitude", n); };
    keys[name + "_exponent"] = [&, f](const YAML::Node& n) { data.exponent = scalar<double>(source, f + "_exponent", n); };
}

}  // namespace detail

/// Parses YAML text. `source` labels diagnostics (normally the file name).
[[nodiscard]] inline SimConfig parse_config(const std::string& text, const std::string& source = "<config>") {
    using detail::count;
    using detail::scalar;
    using detail::Setter;

    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}:{}:{}: {}", source, e.mark.line + 1, e.mark.column + 1, e.msg));
    }

    SimConfig c;
    std::string lambda_kind = "power_law";
    PowerLawWeights power = std::get<PowerLawWeights>(c.noise.weights);
    std::vector<double> list;
    bool have_list = false;

    std::map<std::string, std::map<std::string, Setter>> schema;
    auto& domain = schema["domain"];
    domain["dimension"] = [&](const YAML::Node& n) { c.dimension = scalar<int>(source, "domain.dimension", n); };
    domain["K"] = [&](const YAML::Node& n) { c.modes = count(source, "domain.K", n); };
    domain["collocation"] = [&](const YAML::Node& n) { c.collocation = count(source, "domain.collocation", n); };

    auto& noise = schema["noise"];
    noise["alpha"] = [&](const YAML::Node& n) { c.noise.alpha = scalar<double>(source, "noise.alpha", n); };
    noise["lambda"] = [&](const YAML::Node& n) {
        lambda_kind = detail::choice<std::string>(source, "noise.lambda", n,
                                                  {{"power_law", "power_law"}, {"list", "list"}});
    };
    noise["c"] = [&](const YAML::Node& n) { power.scale = scalar<double>(source, "noise.c", n); };
    noise["beta"] = [&](const YAML::Node& n) { power.exponent = scalar<double>(source, "noise.beta", n); };
    noise["weights"] = [&](const YAML::Node& n) {
        if (!n.IsSequence()) throw ConfigError(detail::where(source, n) + ": noise.weights must be a list");
        list.clear();
        for (const auto& w : n) list.push_back(scalar<double>(source, "noise.weights", w));
        have_list = true;
    };
    noise["gamma"] = [&](const YAML::Node& n) { c.noise.gamma = scalar<double>(source, "noise.gamma", n); };

    auto& dyn = schema["dynamics"];
    dyn["epsilon"] = [&](const YAML::Node& n) { c.epsilon = scalar<double>(source, "dynamics.epsilon", n); };
    dyn["theta"] = [&](const YAML::Node& n) { c.theta = scalar<double>(source, "dynamics.theta", n); };
    dyn["nonlinearity"] = [&](const YAML::Node& n) {
        c.nonlinearity.kind = detail::choice<NonlinearityKind>(
            source, "dynamics.nonlinearity", n,
            {{"zero", NonlinearityKind::zero}, {"diagonal", NonlinearityKind::diagonal}, {"sine", NonlinearityKind::sine}});
    };
    dyn["nonlinearity_c"] = [&](const YAML::Node& n) {
        c.nonlinearity.lipschitz = scalar<double>(source, "dynamics.nonlinearity_c", n);
    };
    dyn["growth_exponent"] = [&](const YAML::Node& n) {
        c.nonlinearity.growth_exponent = scalar<double>(source, "dynamics.growth_exponent", n);
    };
    detail::add_initial(dyn, source, "u0", c.u0);
    detail::add_initial(dyn, source, "v0", c.v0);

    auto& run = schema["run"];
    run["T"] = [&](const YAML::Node& n) { c.horizon = scalar<double>(source, "run.T", n); };
    run["N"] = [&](const YAML::Node& n) { c.steps = count(source, "run.N", n); };
    run["seed"] = [&](const YAML::Node& n) { c.seed = scalar<std::uint64_t>(source, "run.seed", n); };
    run["stride"] = [&](const YAML::Node& n) { c.stride = count(source, "run.stride", n); };
    run["replications"] = [&](const YAML::Node& n) { c.replications = count(source, "run.replications", n); };
    run["workers"] = [&](const YAML::Node& n) { c.workers = count(source, "run.workers", n); };

    if (root.IsDefined() && !root.IsNull()) {
        if (!root.IsMap()) throw ConfigError(detail::where(source, root) + ": top level must be a mapping of sections");
        for (const auto& sec : root) {
            const auto name = sec.first.as<std::string>();
            const auto it = schema.find(name);
            if (it == schema.end()) {
                throw ConfigError(fmt::format("{}: unknown section '{}' (expected domain, noise, dynamics, run)",
                                              detail::where(source, sec.first), name));
            }
            if (sec.second.IsNull()) continue;
            if (!sec.second.IsMap()) {
                throw ConfigError(fmt::format("{}: section '{}' must be a mapping", detail::where(source, sec.second), name));
            }
            for (const auto& kv : sec.second) {
                const auto key = kv.first.as<std::string>();
                const auto k = it->second.find(key);
                if (k == it->second.end()) {
                    throw ConfigError(fmt::format("{}: unknown key '{}' in section '{}'",
                                                  detail::where(source, kv.first), key, name));
                }
                k->second(kv.second);
            }
        }
    }

    if (lambda_kind == "list") {
        if (!have_list) throw ConfigError(source + ": noise.lambda is 'list' but noise.weights is missing");
        c.noise.weights = list;
    } else {
        if (have_list) throw ConfigError(source + ": noise.weights needs noise.lambda: list");
        c.noise.weights = power;
    }

    try {
        c.validate();
        static_cast<void>(c.noise.weights_for(c.modes));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return c;
}

[[nodiscard]] inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

namespace detail {

inline const char* name_of(NonlinearityKind k) {
    switch (k) {
        case NonlinearityKind::zero: return "zero";
        case NonlinearityKind::diagonal: return "diagonal";
        case NonlinearityKind::sine: return "sine";
    }
    return "?";
}

inline const char* name_of(InitialKind k) {
    switch (k) {
        case InitialKind::zero: return "zero";
        case InitialKind::single_mode: return "single_mode";
        case InitialKind::power_law: return "power_law";
    }
    return "?";
}

inline void put_initial(nlohmann::json& j, const std::string& name, const InitialData& d) {
    j[name] = name_of(d.kind);
    j[name + "_mode"] = d.mode;
    j[name + "_amplitude"] = d.amplitude;
    j[name + "_exponent"] = d.exponent;
}

}  // namespace detail

/// Complete snapshot with the same sections and keys as the YAML schema.
[[nodiscard]] inline nlohmann::json config_to_json(const SimConfig& c) {
    nlohmann::json j;
    j["domain"] = {{"dimension", c.dimension}, {"K", c.modes}, {"collocation", c.collocation}};
    auto& n = j["noise"];
    n["alpha"] = c.noise.alpha;
    n["gamma"] = c.noise.gamma;
    if (const auto* p = std::get_if<PowerLawWeights>(&c.noise.weights)) {
        n["lambda"] = "power_law";
        n["c"] = p->scale;
        n["beta"] = p->exponent;
    } else {
        n["lambda"] = "list";
        n["weights"] = std::get<std::vector<double>>(c.noise.weights);
    }
    auto& d = j["dynamics"];
    d["epsilon"] = c.epsilon;
    d["theta"] = c.theta;
    d["nonlinearity"] = detail::name_of(c.nonlinearity.kind);
    d["nonlinearity_c"] = c.nonlinearity.lipschitz;
    d["growth_exponent"] = c.nonlinearity.growth_exponent;
    detail::put_initial(d, "u0", c.u0);
    detail::put_initial(d, "v0", c.v0);
    j["run"] = {{"T", c.horizon},       {"N", c.steps},
                {"seed", c.seed},       {"stride", c.stride},
                {"replications", c.replications}};
    return j;
}

/// SHA-256 of the canonical snapshot. Worker count is not part of it.
[[nodiscard]] inline std::string config_hash(const SimConfig& c) { return sha256_hex(config_to_json(c).dump()); }

}  // namespace sklimit::harness
