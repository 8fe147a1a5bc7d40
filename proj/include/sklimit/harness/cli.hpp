#pragma once

// Subcommand driver behind the sklimit executable.
//
// Exit codes: 0 success, 1 runtime error, 2 validation failure (invalid
// config, failed A1 check, splitting residual over its bound), 64 usage error.

#include "sklimit/sklimit.hpp"
#include "sklimit/harness/config_io.hpp"
#include "sklimit/harness/manifest.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sklimit::harness {

inline constexpr int exit_ok = 0;
inline constexpr int exit_runtime = 1;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_usage = 64;

inline constexpr const char* out_dir_env = "SKLIMIT_OUT";
inline constexpr const char* default_out_dir = "sklimit-out";

struct CliOptions {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::size_t> replications;
    std::optional<std::size_t> workers;
    std::vector<double> eps_grid;
    std::vector<double> deltas;
    std::string format = "csv";
    // subcommand specific
    std::size_t samples = 100000;
    std::string export_noise;
    std::optional<std::uint64_t> split_seed;
    bool unit_weights = false;
};

[[nodiscard]] inline std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw CLI::ValidationError("list entry '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

/// Writes files into the output directory and records their digests.
class RunContext {
public:
    RunContext(std::string command, const SimConfig& config, const CliOptions& opt, std::ostream& out)
        : out_(out), format_(opt.format) {
        std::string dir = opt.out_dir;
        if (dir.empty()) {
            const char* env = std::getenv(out_dir_env);
            dir = env && *env ? env : default_out_dir;
        }
        dir_ = dir;
        std::filesystem::create_directories(dir_);
        manifest_.command = std::move(command);
        manifest_.config = config_to_json(config);
        manifest_.config_hash = config_hash(config);
        manifest_.master_seed = config.seed;
        manifest_.workers = config.workers;
        manifest_.started = utc_timestamp();
    }

    [[nodiscard]] bool json() const noexcept { return format_ == "json"; }
    [[nodiscard]] const std::string& hash() const noexcept { return manifest_.config_hash; }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body, bool binary = false) {
        const auto path = dir_ / name;
        {
            std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
            if (!f) throw std::runtime_error("cannot write " + path.string());
            body(f);
        }
        manifest_.outputs.push_back({name, sha256_file(path.string())});
        out_ << "wrote " << path.string() << '\n';
    }

    /// {"format", "config_hash", "seed", "report"} document.
    void write_report(const std::string& name, const std::string& kind, const nlohmann::json& report) {
        nlohmann::json doc = {{"format", "sklimit-" + kind},
                              {"version", 1},
                              {"config_hash", manifest_.config_hash},
                              {"seed", manifest_.master_seed},
                              {"report", report}};
        write(name, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    }

    void finish() {
        manifest_.finished = utc_timestamp();
        const auto path = dir_ / (manifest_.command + ".manifest.json");
        write_manifest(manifest_, path);
        out_ << "wrote " << path.string() << '\n';
    }

private:
    std::ostream& out_;
    std::string format_;
    std::filesystem::path dir_;
    RunManifest manifest_;
};

namespace detail {

[[nodiscard]] inline SimConfig resolve_config(const CliOptions& opt) {
    SimConfig c = opt.config_file.empty() ? parse_config("", "<defaults>") : load_config(opt.config_file);
    if (opt.seed) c.seed = *opt.seed;
    if (opt.replications) c.replications = *opt.replications;
    if (opt.workers) c.workers = *opt.workers;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline int cmd_validate(const CliOptions& opt, std::ostream& out) {
    const SimConfig c = resolve_config(opt);
    const auto basis = c.make_basis();
    const A1Report r = validate_A1(c.noise, *basis);
    RunContext ctx("validate", c, opt, out);
    ctx.write_report("validate.json", "validate", r);
    ctx.finish();
    out << "A1: " << to_string(r.verdict) << '\n';
    for (const auto& reason : r.reasons) out << "  " << reason << '\n';
    if (r.admissible_gamma) {
        out << fmt::format("  admissible gamma: ({}, {})\n", r.admissible_gamma->first, r.admissible_gamma->second);
    }
    return r.verdict == Verdict::fail ? exit_invalid : exit_ok;
}

inline int cmd_noise_test(const CliOptions& opt, std::ostream& out) {
    const SimConfig c = resolve_config(opt);
    const auto d = noise_diagnostics(c.noise.alpha, opt.samples, c.seed);
    RunContext ctx("noise-test", c, opt, out);
    if (ctx.json()) {
        ctx.write_report("noise-test.json", "noise-test", d);
    } else {
        ctx.write("noise-test.csv", [&](std::ostream& os) {
            os << fmt::format("# sklimit-noise-test v1 alpha={} samples={}\n", d.alpha, d.samples);
            os << "quantity,value,reference\n";
            for (const auto& p : d.ecf) os << fmt::format("ecf_h={},{},{}\n", p.h, p.empirical, p.exact);
            os << fmt::format("ks_aggregation,{},{}\n", d.ks_statistic, d.ks_critical);
            os << fmt::format("hill_index,{},{}\n", d.hill_index, d.alpha);
            os << fmt::format("mean_abs,{},\n", d.first_moment.estimate);
        });
    }
    if (!opt.export_noise.empty()) {
        const NoisePath path = make_path(c.noise, c.modes, c.steps, c.horizon, replication_seed(c.seed, 0));
        const bool binary = opt.export_noise.ends_with(".bin");
        ctx.write(opt.export_noise,
                  [&](std::ostream& os) { binary ? write_path_binary(path, os) : write_path_csv(path, os); }, binary);
    }
    ctx.finish();
    for (const auto& p : d.ecf) out << fmt::format("ecf h={}: {} (exact {})\n", p.h, p.empirical, p.exact);
    out << fmt::format("aggregation KS: {} (1% critical {})\n", d.ks_statistic, d.ks_critical);
    out << fmt::format("Hill index (top 1%): {}\n", d.hill_index);
    out << fmt::format("E|X|: {} [{}, {}]\n", d.first_moment.estimate, d.first_moment.ci.low, d.first_moment.ci.high);
    return exit_ok;
}

inline int cmd_simulate(const CliOptions& opt, std::ostream& out) {
    const SimConfig c = resolve_config(opt);
    const auto basis = c.make_basis();
    const NoisePath path = make_path(c.noise, c.modes, c.steps, c.horizon, replication_seed(c.seed, 0));
    auto wave = solve_wave(c, basis, path);
    auto heat = solve_heat(c, basis, path);
    RunContext ctx("simulate", c, opt, out);
    for (auto* t : {&wave, &heat}) t->provenance.config_hash = ctx.hash();
    const std::string ext = ctx.json() ? ".json" : ".csv";
    for (const auto* t : {&wave, &heat}) {
        ctx.write(t->provenance.kind + ext, [&](std::ostream& os) {
            if (ctx.json()) {
                os << trajectory_to_json(*t).dump() << '\n';
            } else {
                write_trajectory_csv(*t, os);
            }
        });
    }
    if (!opt.export_noise.empty()) {
        const bool binary = opt.export_noise.ends_with(".bin");
        ctx.write(opt.export_noise,
                  [&](std::ostream& os) { binary ? write_path_binary(path, os) : write_path_csv(path, os); }, binary);
    }
    ctx.finish();
    out << fmt::format("sup ||U||_1: wave {} heat {}\n", wave.sup_gradient_norm, heat.sup_gradient_norm);
    return exit_ok;
}

inline int cmd_decompose(const CliOptions& opt, std::ostream& out) {
    const SimConfig c = resolve_config(opt);
    const auto basis = c.make_basis();
    const NoisePath path = make_path(c.noise, c.modes, c.steps, c.horizon, replication_seed(c.seed, 0));
    std::optional<NoisePath> other;
    if (opt.split_seed) {
        other = make_path(c.noise, c.modes, c.steps, c.horizon, replication_seed(*opt.split_seed, 0));
    }
    const auto r = decomposition_residual(c, basis, path, other ? *other : path);
    const double bound = 1e-10 * (1.0 + r.max_velocity_norm);
    RunContext ctx("decompose", c, opt, out);
    ctx.write_report("decompose.json", "decompose",
                     {{"residual", r.residual}, {"max_velocity_norm", r.max_velocity_norm}, {"bound", bound},
                      {"split_seed", opt.split_seed ? nlohmann::json(*opt.split_seed) : nlohmann::json(nullptr)}});
    ctx.finish();
    out << fmt::format("residual {} (bound {}, max ||V||_0 {})\n", r.residual, bound, r.max_velocity_norm);
    return r.residual < bound ? exit_ok : exit_invalid;
}

inline int cmd_moments(const CliOptions& opt, std::ostream& out) {
    SimConfig c = resolve_config(opt);
    if (opt.unit_weights) c.noise.weights = std::vector<double>(c.modes, 1.0);
    const auto eps = opt.eps_grid.empty() ? std::vector<double>{1.0, 0.1, 0.01} : opt.eps_grid;
    const auto m = mode_moments(c, eps);
    const auto g = gradient_bound(c, eps);
    RunContext ctx("moments", c, opt, out);
    if (ctx.json()) {
        ctx.write_report("moments.json", "moments", m);
        ctx.write_report("gradient.json", "gradient", g);
    } else {
        ctx.write("moments.csv", [&](std::ostream& os) { write_moments_csv(m, os); });
        ctx.write("gradient.csv", [&](std::ostream& os) { write_gradient_csv(g, os); });
    }
    ctx.finish();
    for (const auto& row : m.rows) {
        out << fmt::format("eps {}: slope of log E|u_k(T)| on log alpha_k = {}\n", row.epsilon, row.slope.slope);
    }
    out << fmt::format("normalized moment max/min ratio {}\n", m.normalized_ratio);
    out << fmt::format("sup-moment bound: constant {}, worst excess {}\n", m.sup_bound_constant, m.sup_bound_excess);
    out << fmt::format("E sup ||U||_1 max/min ratio {}\n", g.ratio);
    return exit_ok;
}

inline int cmd_modulus(const CliOptions& opt, std::ostream& out) {
    const SimConfig c = resolve_config(opt);
    const auto deltas = opt.deltas.empty() ? std::vector<double>{1e-4, 3e-4, 1e-3, 3e-3, 1e-2} : opt.deltas;
    const auto r = increment_modulus(c, deltas);
    RunContext ctx("modulus", c, opt, out);
    if (ctx.json()) {
        ctx.write_report("modulus.json", "modulus", r);
    } else {
        ctx.write("modulus.csv", [&](std::ostream& os) { write_modulus_csv(r, os); });
    }
    ctx.finish();
    if (r.fit) out << fmt::format("log-log slope {}\n", r.fit->slope);
    return exit_ok;
}

inline int cmd_converge(const CliOptions& opt, std::ostream& out) {
    const SimConfig c = resolve_config(opt);
    const auto eps = opt.eps_grid.empty() ? std::vector<double>{1e-1, 3e-2, 1e-2, 3e-3, 1e-3} : opt.eps_grid;
    const auto deltas = opt.deltas.empty() ? default_exceedance_deltas : opt.deltas;
    const auto r = convergence_experiment(c, eps, deltas);
    RunContext ctx("converge", c, opt, out);
    if (ctx.json()) {
        ctx.write_report("converge.json", "converge", r);
    } else {
        ctx.write("converge.csv", [&](std::ostream& os) { write_rate_csv(r, os); });
        ctx.write("exceedance.csv", [&](std::ostream& os) { write_exceedance_csv(r, os); });
    }
    ctx.finish();
    if (r.fit) out << fmt::format("fitted slope {} (theta {})\n", r.fit->slope, r.theta);
    return exit_ok;
}

}  // namespace detail

/// Parses argv and runs one subcommand.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Small-mass limit simulator for a damped wave equation with alpha-stable noise", "sklimit"};
    app.set_version_flag("--version", SKLIMIT_VERSION);
    app.require_subcommand(1);
    CliOptions opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_file, "YAML config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "master seed (overrides run.seed)");
        sub->add_option("--out", opt.out_dir, std::string("output directory (default $") + out_dir_env + " or " +
                                                  default_out_dir + ")");
        sub->add_option("--replications", opt.replications, "Monte Carlo replications")->check(CLI::PositiveNumber);
        sub->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--format", opt.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    };
    auto eps_option = [&](CLI::App* sub) {
        sub->add_option_function<std::string>(
            "--eps-grid", [&](const std::string& s) { opt.eps_grid = parse_list(s); },
            "comma separated epsilon values");
    };
    auto delta_option = [&](CLI::App* sub, const char* help) {
        sub->add_option_function<std::string>(
            "--deltas", [&](const std::string& s) { opt.deltas = parse_list(s); }, help);
    };

    std::vector<std::pair<CLI::App*, std::function<int(const CliOptions&, std::ostream&)>>> commands;
    auto* validate = app.add_subcommand("validate", "check assumption A1 for the configured noise");
    common(validate);
    commands.emplace_back(validate, detail::cmd_validate);

    auto* noise = app.add_subcommand("noise-test", "stable sampler diagnostics");
    common(noise);
    noise->add_option("--samples", opt.samples, "number of draws")->check(CLI::Range(100, 100000000));
    noise->add_option("--export-noise", opt.export_noise, "also write the noise path (.csv or .bin)");
    commands.emplace_back(noise, detail::cmd_noise_test);

    auto* simulate = app.add_subcommand("simulate", "one wave and heat solve with trajectory export");
    common(simulate);
    simulate->add_option("--export-noise", opt.export_noise, "also write the noise path (.csv or .bin)");
    commands.emplace_back(simulate, detail::cmd_simulate);

    auto* decompose = app.add_subcommand("decompose", "velocity splitting residual");
    common(decompose);
    decompose->add_option("--split-seed", opt.split_seed, "drive the split components with another seed");
    commands.emplace_back(decompose, detail::cmd_decompose);

    auto* moments = app.add_subcommand("moments", "mode moments and gradient bound suites");
    common(moments);
    eps_option(moments);
    moments->add_flag("--unit-weights", opt.unit_weights, "use lambda_k = 1 for every mode");
    commands.emplace_back(moments, detail::cmd_moments);

    auto* modulus = app.add_subcommand("modulus", "increment modulus of the linear part");
    common(modulus);
    delta_option(modulus, "comma separated increment lengths");
    commands.emplace_back(modulus, detail::cmd_modulus);

    auto* converge = app.add_subcommand("converge", "wave against heat convergence experiment");
    common(converge);
    eps_option(converge);
    delta_option(converge, "comma separated exceedance thresholds");
    commands.emplace_back(converge, detail::cmd_converge);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        static_cast<void>(app.exit(e, out, err));
        return exit_usage;
    }

    try {
        for (const auto& [sub, fn] : commands) {
            if (sub->parsed()) return fn(opt, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}

}  // namespace sklimit::harness
