// Acceptance suite: one PASS/FAIL line per criterion. Arguments select a
// subset of criterion numbers; no arguments runs all ten.

#include "../oracles.hpp"
#include "sklimit/sklimit.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace sklimit;

namespace {

constexpr std::uint64_t master_seed = 1;

struct Outcome {
    bool pass = false;
    std::string detail;
    std::string json;  // deterministic payload compared by criterion 10
};

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;  // 0: no runtime limit
    std::function<Outcome(std::size_t workers)> run;
};

// Tolerances and experiment sizes.
constexpr double kernel_tol = 1e-8;
constexpr double rk4_step = 2e-5;
constexpr double det_rel_tol = 1e-12;
constexpr double split_rel_tol = 1e-10;
constexpr std::size_t split_configs = 10;
constexpr std::size_t ecf_draws = 1'000'000;
constexpr double ecf_tol = 0.005;
constexpr std::size_t moment_paths = 2000;
constexpr double moment_slope = -0.5;
constexpr double moment_slope_tol = 0.15;
constexpr double moment_ratio_cap = 50.0;
constexpr std::size_t gradient_paths = 200;
constexpr double gradient_ratio_cap = 3.0;
constexpr std::size_t modulus_paths = 500;
constexpr double modulus_slope_lo = 0.35;
constexpr double modulus_slope_hi = 0.65;
constexpr std::size_t rate_paths = 200;
constexpr double rate_slope_min = 0.4;
constexpr double exceed_delta = 0.1;
constexpr double exceed_cap = 0.05;

const std::vector<double> kernel_eigenvalues{1.0, 9.0, 100.0};
const std::vector<double> rate_eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};

std::vector<double> kernel_eps(double a) {
    return {1.0, 0.1, 0.01, 0.25 / a - 1e-7, 0.25 / a, 0.25 / a + 1e-7};
}

Outcome kernels_vs_rk4(std::size_t) {
    std::vector<double> times;
    for (int i = 1; i <= 1000; ++i) times.push_back(0.005 * i);
    double worst = 0.0;
    for (double a : kernel_eigenvalues) {
        for (double eps : kernel_eps(a)) {
            const auto rk = oracle::rk4_kernels(eps, a, times, rk4_step);
            const auto k0 = kernels(eps, a, 0.0);
            worst = std::max({worst, std::abs(k0.f), std::abs(k0.g - 1.0)});
            for (std::size_t i = 0; i < times.size(); ++i) {
                const auto k = kernels(eps, a, times[i]);
                worst = std::max({worst, std::abs(k.f - rk[i][0]), std::abs(k.g - rk[i][1])});
            }
        }
    }
    return {worst < kernel_tol, fmt::format("max abs error {:.3e} (tol {:.0e})", worst, kernel_tol), ""};
}

Outcome liouville(std::size_t) {
    double worst = 0.0;
    for (double a : kernel_eigenvalues) {
        for (double eps : kernel_eps(a)) {
            for (int e : {14, 10, 6}) {
                const double dt = std::ldexp(1.0, -e);
                const double exact = std::exp(-dt / eps);
                worst = std::max(worst, std::abs(propagator(eps, a, dt).determinant() - exact) / exact);
            }
        }
    }
    return {worst < det_rel_tol, fmt::format("max relative error {:.3e} (tol {:.0e})", worst, det_rel_tol), ""};
}

SimConfig random_config(Engine& rng, std::size_t i) {
    auto pick = [&](double lo, double hi) { return lo + (hi - lo) * uniform_open(rng); };
    SimConfig c;
    c.dimension = 1 + static_cast<int>(uniform_index(rng, 3));
    c.modes = 4 + uniform_index(rng, 21);
    c.steps = std::size_t{256} << uniform_index(rng, 4);
    c.epsilon = std::pow(10.0, pick(-3.0, 0.0));
    c.theta = pick(0.0, 0.9);
    c.noise.alpha = pick(1.1, 1.9);
    c.noise.weights = PowerLawWeights{pick(0.01, 1.0), pick(1.0, 6.0)};
    const NonlinearityKind kinds[] = {NonlinearityKind::sine, NonlinearityKind::diagonal, NonlinearityKind::zero};
    c.nonlinearity.kind = i < 4 ? NonlinearityKind::sine : kinds[uniform_index(rng, 3)];
    c.nonlinearity.lipschitz = pick(0.1, 2.0);
    c.u0 = uniform_index(rng, 2) == 0 ? InitialData{InitialKind::power_law, 1, pick(0.1, 2.0), pick(1.5, 3.0)}
                                      : InitialData{InitialKind::single_mode, 1 + uniform_index(rng, c.modes), pick(-2.0, 2.0)};
    c.v0 = InitialData{InitialKind::single_mode, 1 + uniform_index(rng, c.modes), pick(-1.0, 1.0)};
    c.seed = mix64(master_seed + i);
    c.validate();
    return c;
}

Outcome splitting(std::size_t) {
    Engine rng(mix64(master_seed ^ 0x5b1177ULL));
    nlohmann::json out = nlohmann::json::array();
    bool pass = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < split_configs; ++i) {
        const SimConfig c = random_config(rng, i);
        const auto basis = c.make_basis();
        const auto path = make_path(c.noise, c.modes, c.steps, c.horizon, c.seed);
        const auto r = decomposition_residual(c, basis, path);
        const double ratio = r.residual / (split_rel_tol * (1.0 + r.max_velocity_norm));
        worst = std::max(worst, ratio);
        pass = pass && ratio < 1.0;
        out.push_back({{"config", i}, {"residual", r.residual}, {"max_velocity_norm", r.max_velocity_norm}});
    }
    return {pass, fmt::format("worst residual / bound = {:.3e} over {} configs", worst, split_configs), out.dump()};
}

Outcome noise_law(std::size_t) {
    bool pass = true;
    double worst_ecf = 0.0, worst_ks = 0.0;
    nlohmann::json out = nlohmann::json::array();
    for (double alpha : {1.2, 1.5, 1.8}) {
        const auto d = noise_diagnostics(alpha, ecf_draws, mix64(master_seed + static_cast<std::uint64_t>(alpha * 10)), 4, 1);
        for (const auto& p : d.ecf) {
            worst_ecf = std::max(worst_ecf, std::abs(p.empirical - p.exact));
            pass = pass && std::abs(p.empirical - p.exact) <= ecf_tol;
        }
        worst_ks = std::max(worst_ks, d.ks_statistic / d.ks_critical);
        pass = pass && d.ks_statistic < d.ks_critical;
        out.push_back(d);
    }
    return {pass, fmt::format("max |ecf - exact| {:.4f} (tol {}), max KS / critical {:.3f}", worst_ecf, ecf_tol, worst_ks),
            out.dump()};
}

Outcome mode_scaling(std::size_t workers) {
    SimConfig c;
    c.seed = master_seed;
    c.replications = moment_paths;
    c.workers = workers;
    c.noise.weights = std::vector<double>(c.modes, 1.0);
    const auto rep = mode_moments(c, {1.0, 0.1, 0.01});
    bool pass = rep.normalized_ratio < moment_ratio_cap;
    std::string slopes;
    for (const auto& row : rep.rows) {
        pass = pass && std::abs(row.slope.slope - moment_slope) <= moment_slope_tol;
        slopes += fmt::format(" eps={}:{:.3f}", row.epsilon, row.slope.slope);
    }
    return {pass,
            fmt::format("slopes{} (target {} +- {}), normalized ratio {:.2f} (cap {})", slopes, moment_slope,
                        moment_slope_tol, rep.normalized_ratio, moment_ratio_cap),
            nlohmann::json(rep).dump()};
}

Outcome gradient(std::size_t workers) {
    SimConfig c;
    c.seed = master_seed;
    c.modes = 32;
    c.replications = gradient_paths;
    c.workers = workers;
    const auto rep = gradient_bound(c, {1.0, 0.1, 0.01});
    return {rep.ratio < gradient_ratio_cap,
            fmt::format("E sup ||U||_1 = {:.4f}, {:.4f}, {:.4f}; ratio {:.3f} (cap {})", rep.mean[0], rep.mean[1],
                        rep.mean[2], rep.ratio, gradient_ratio_cap),
            nlohmann::json(rep).dump()};
}

Outcome modulus(std::size_t workers) {
    SimConfig c;
    c.seed = master_seed;
    c.epsilon = 0.01;
    c.steps = 1 << 14;
    c.replications = modulus_paths;
    c.workers = workers;
    const auto rep = increment_modulus(c, {1e-4, 3e-4, 1e-3, 3e-3, 1e-2});
    const double slope = rep.fit ? rep.fit->slope : std::nan("");
    return {rep.fit && slope >= modulus_slope_lo && slope <= modulus_slope_hi,
            fmt::format("log-log slope {:.3f} (range [{}, {}])", slope, modulus_slope_lo, modulus_slope_hi),
            nlohmann::json(rep).dump()};
}

SimConfig rate_config(double theta, std::size_t workers) {
    SimConfig c;
    c.seed = master_seed;
    c.theta = theta;
    c.modes = 32;
    c.steps = 1 << 13;
    c.nonlinearity = {NonlinearityKind::sine, 0.5};
    c.replications = rate_paths;
    c.workers = workers;
    return c;
}

Outcome rate(std::size_t workers) {
    const auto rep = convergence_experiment(rate_config(0.5, workers), rate_eps);
    bool ci_ok = true;
    for (const auto& ci : rep.ci) ci_ok = ci_ok && ci.low > 0.0;
    const double slope = rep.fit ? rep.fit->slope : std::nan("");
    std::string means;
    for (double m : rep.mean) means += fmt::format(" {:.3e}", m);
    return {rep.fit && slope >= rate_slope_min && ci_ok,
            fmt::format("slope {:.3f} (min {}), CIs exclude zero: {}, means{}", slope, rate_slope_min,
                        ci_ok ? "yes" : "no", means),
            nlohmann::json(rep).dump()};
}

Outcome exceedance(std::size_t workers) {
    const auto rep = convergence_experiment(rate_config(0.0, workers), rate_eps, {exceed_delta});
    bool monotone = true;
    std::string row;
    for (std::size_t e = 0; e < rep.epsilons.size(); ++e) {
        row += fmt::format(" {}", rep.exceedance[e][0]);
        if (e > 0) monotone = monotone && rep.exceedance[e][0] <= rep.exceedance[e - 1][0];
    }
    const double last = rep.exceedance.back()[0];
    return {monotone && last < exceed_cap,
            fmt::format("P(sup > {}) over eps{}:{}; monotone: {}, last < {}: {}", exceed_delta, "{1e-1..1e-3}", row,
                        monotone ? "yes" : "no", exceed_cap, last < exceed_cap ? "yes" : "no"),
            nlohmann::json(rep).dump()};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };

    const std::vector<Criterion> criteria{
        {1, "kernels match an RK4 integration", 5.0, kernels_vs_rk4},
        {2, "propagator determinant equals exp(-dt/eps)", 1.0, liouville},
        {3, "velocity splitting residual", 60.0, splitting},
        {4, "stable sampler law", 30.0, noise_law},
        {5, "mode moment scaling", 300.0, mode_scaling},
        {6, "gradient moment boundedness", 300.0, gradient},
        {7, "increment modulus slope", 300.0, modulus},
        {8, "wave to heat rate for theta = 0.5", 900.0, rate},
        {9, "wave to heat exceedance for theta = 0", 900.0, exceedance},
    };

    std::map<int, std::string> payload;
    int failures = 0;
    int ran = 0;
    auto report = [&](int id, const char* title, bool pass, const std::string& detail, double secs) {
        ++ran;
        if (!pass) ++failures;
        fmt::print("{} {:>2} {}: {} [{:.1f} s]\n", pass ? "PASS" : "FAIL", id, title, detail, secs);
        std::fflush(stdout);
    };

    for (const auto& c : criteria) {
        if (!wanted(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run(1);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what(), ""};
        }
        const double secs = seconds_since(t0);
        std::string detail = o.detail;
        bool pass = o.pass;
        if (c.budget_seconds > 0.0 && secs >= c.budget_seconds) {
            pass = false;
            detail += fmt::format("; runtime over the {:.0f} s budget", c.budget_seconds);
        }
        payload[c.id] = o.json;
        report(c.id, c.title, pass, detail, secs);
    }

    if (wanted(10)) {
        const auto t0 = std::chrono::steady_clock::now();
        bool pass = true;
        std::string detail;
        for (const auto& c : criteria) {
            if (c.id < 3) continue;
            try {
                if (!payload.count(c.id)) payload[c.id] = c.run(1).json;
                const bool same = c.run(4).json == payload[c.id] && !payload[c.id].empty();
                pass = pass && same;
                detail += fmt::format(" {}:{}", c.id, same ? "same" : "DIFFERENT");
            } catch (const std::exception& e) {
                pass = false;
                detail += fmt::format(" {}:error({})", c.id, e.what());
            }
        }
        report(10, "outputs identical for workers 1 and 4", pass, "criteria" + detail, seconds_since(t0));
    }

    fmt::print("{} of {} criteria passed\n", ran - failures, ran);
    return failures == 0 ? 0 : 1;
}
