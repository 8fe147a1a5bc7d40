#pragma once

// Monte Carlo experiments over replications. Replication r is driven by the
// noise path seeded with replication_seed(config.seed, r), shared by every
// solve of that replication (common random numbers).

#include "sklimit/basis.hpp"
#include "sklimit/config.hpp"
#include "sklimit/estimators.hpp"
#include "sklimit/heat.hpp"
#include "sklimit/parallel.hpp"
#include "sklimit/random.hpp"
#include "sklimit/stable.hpp"
#include "sklimit/wave.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sklimit {

/// Sorted strictly decreasing; entries must lie in (0, 1].
[[nodiscard]] inline std::vector<double> checked_eps_grid(std::vector<double> grid) {
    if (grid.empty()) throw std::invalid_argument("epsilon grid is empty");
    for (double e : grid) {
        if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("epsilon must lie in (0,1]");
    }
    std::sort(grid.begin(), grid.end(), std::greater<>());
    if (std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
        throw std::invalid_argument("epsilon grid has repeated values");
    }
    return grid;
}

/// Log-log fit of distance against epsilon.
[[nodiscard]] inline LinearFit fit_rate(std::span<const double> eps, std::span<const double> distance) {
    if (eps.size() < 3) throw std::invalid_argument("a slope fit needs at least 3 epsilon points");
    return log_log_fit(eps, distance);
}

namespace detail {

[[nodiscard]] inline std::uint64_t column_seed(std::size_t column) {
    return mix64(default_bootstrap_seed ^ mix64(column + 1));
}

struct ColumnSummary {
    double mean = 0.0;
    double standard_error = 0.0;
    Interval ci;
};

[[nodiscard]] inline ColumnSummary summarize(std::span<const double> x, std::size_t column) {
    return {sklimit::mean(x), sklimit::standard_error(x), bootstrap_mean_ci(x, default_bootstrap_resamples, column_seed(column))};
}

/// rows x cols matrix (row = replication) -> column `c`.
[[nodiscard]] inline std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c) {
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][c];
    return out;
}

[[nodiscard]] inline NoisePath replication_path(const SimConfig& config, std::size_t r) {
    return make_path(config.noise, config.modes, config.steps, config.horizon,
                     replication_seed(config.seed, r));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Wave against heat

inline const std::vector<double> default_exceedance_deltas{0.05, 0.1, 0.2};

struct RateReport {
    double theta = 0.0;
    double norm_index = -2.0;
    std::size_t replications = 0;
    std::vector<double> epsilons;
    std::vector<double> mean;
    std::vector<double> standard_error;
    std::vector<Interval> ci;
    std::optional<LinearFit> fit;
    std::vector<double> deltas;
    std::vector<std::vector<double>> exceedance;  // [epsilon][delta]
    std::vector<std::string> notes;
};

/// Per replication and epsilon: sup_n ||U^eps_n - Ubar_n||_s on the solver grid,
/// with s = -2 for theta > 0 and s = -1 for theta = 0.
[[nodiscard]] inline RateReport convergence_experiment(const SimConfig& base, std::vector<double> eps_grid,
                                                       std::vector<double> deltas = default_exceedance_deltas) {
    const auto grid = checked_eps_grid(std::move(eps_grid));
    if (grid.size() < 3) throw std::invalid_argument("a slope fit needs at least 3 epsilon points");
    for (double e : grid) {
        SimConfig c = base;
        c.epsilon = e;
        c.validate();
    }
    std::sort(deltas.begin(), deltas.end());
    const BasisPtr basis = base.make_basis();
    const std::size_t K = base.modes;
    const std::size_t N = base.steps;
    const bool shared_limit = base.theta == 0.0;
    const double s = shared_limit ? -1.0 : -2.0;

    const auto rows = run_replications(base.replications, base.workers, [&](std::size_t r) {
        const NoisePath path = detail::replication_path(base, r);
        std::vector<double> out(grid.size(), 0.0);
        std::vector<double> heat;
        if (shared_limit) {
            HeatStepper h(base, basis, path);
            heat.resize((N + 1) * K);
            std::copy(h.u().begin(), h.u().end(), heat.begin());
            for (std::size_t n = 1; n <= N; ++n) {
                h.step();
                std::copy(h.u().begin(), h.u().end(), heat.begin() + static_cast<std::ptrdiff_t>(n * K));
            }
        }
        for (std::size_t e = 0; e < grid.size(); ++e) {
            SimConfig c = base;
            c.epsilon = grid[e];
            WaveStepper w(c, basis, path);
            double sup = 0.0;
            if (shared_limit) {
                for (std::size_t n = 1; n <= N; ++n) {
                    w.step();
                    sup = std::max(sup, sobolev_distance(*basis, w.u(), {heat.data() + n * K, K}, s));
                }
            } else {
                HeatStepper h(c, basis, path);
                for (std::size_t n = 1; n <= N; ++n) {
                    w.step();
                    h.step();
                    sup = std::max(sup, sobolev_distance(*basis, w.u(), h.u(), s));
                }
            }
            out[e] = sup;
        }
        return out;
    });

    RateReport rep;
    rep.theta = base.theta;
    rep.norm_index = s;
    rep.replications = base.replications;
    rep.epsilons = grid;
    rep.deltas = deltas;
    for (std::size_t e = 0; e < grid.size(); ++e) {
        const auto col = detail::column(rows, e);
        const auto sum = detail::summarize(col, e);
        rep.mean.push_back(sum.mean);
        rep.standard_error.push_back(sum.standard_error);
        rep.ci.push_back(sum.ci);
        std::vector<double> row;
        for (double d : deltas) {
            const auto hits = std::count_if(col.begin(), col.end(), [d](double x) { return x > d; });
            row.push_back(static_cast<double>(hits) / static_cast<double>(col.size()));
        }
        rep.exceedance.push_back(std::move(row));
    }
    if (std::all_of(rep.mean.begin(), rep.mean.end(), [](double m) { return m > 0.0; })) {
        rep.fit = fit_rate(rep.epsilons, rep.mean);
    }
    if (shared_limit) {
        rep.notes.emplace_back("uniform distance in H^-1 used as an upper bound for the Skorokhod distance");
    } else {
        rep.notes.emplace_back("the rate eps^theta is an upper bound; comparing the slope with theta assumes it is sharp");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Increment modulus of the linear part

struct ModulusReport {
    std::size_t replications = 0;
    std::vector<double> deltas;       // requested
    std::vector<double> deltas_used;  // rounded to whole steps
    std::vector<std::size_t> delta_steps;
    std::vector<double> taus;
    std::vector<double> mean;
    std::vector<Interval> ci;
    std::optional<LinearFit> fit;
    std::vector<std::string> notes;
};

/// Default start times T/8, T/4, 3T/8, T/2.
[[nodiscard]] inline std::vector<double> default_modulus_taus(double horizon) {
    return {horizon / 8.0, horizon / 4.0, 3.0 * horizon / 8.0, horizon / 2.0};
}

/// Mean over replications and start times tau of ||u(tau + delta) - u(tau)||_-1
/// for the linear part u.
[[nodiscard]] inline ModulusReport increment_modulus(const SimConfig& config, std::vector<double> deltas,
                                                     std::vector<double> taus = {}) {
    const double T = config.horizon;
    const double dt = config.step_size();
    if (deltas.empty()) throw std::invalid_argument("delta grid is empty");
    if (taus.empty()) taus = default_modulus_taus(T);
    std::sort(deltas.begin(), deltas.end());
    std::vector<std::size_t> dsteps, tsteps;
    for (double d : deltas) {
        if (!(d > 0.0 && d <= 0.5 * T)) throw std::invalid_argument("delta must lie in (0, T/2]");
        dsteps.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(d / dt))));
    }
    for (double t : taus) {
        if (!(t >= 0.0 && t <= 0.5 * T)) throw std::invalid_argument("tau must lie in [0, T/2]");
        tsteps.push_back(static_cast<std::size_t>(std::llround(t / dt)));
    }
    std::vector<std::size_t> wanted;
    for (auto t : tsteps) {
        wanted.push_back(t);
        for (auto m : dsteps) wanted.push_back(t + m);
    }
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    if (wanted.back() > config.steps) throw std::invalid_argument("tau + delta exceeds T");

    const SimConfig lin = linear_config(config);
    const BasisPtr basis = config.make_basis();

    const auto rows = run_replications(config.replications, config.workers, [&](std::size_t r) {
        const NoisePath path = detail::replication_path(lin, r);
        WaveStepper w(lin, basis, path);
        std::map<std::size_t, std::vector<double>> snap;
        auto it = wanted.begin();
        while (it != wanted.end()) {
            while (w.step_index() < *it) w.step();
            snap.emplace(*it, std::vector<double>(w.u().begin(), w.u().end()));
            ++it;
        }
        std::vector<double> out(dsteps.size(), 0.0);
        for (std::size_t i = 0; i < dsteps.size(); ++i) {
            for (auto t : tsteps) out[i] += sobolev_distance(*basis, snap.at(t + dsteps[i]), snap.at(t), -1.0);
            out[i] /= static_cast<double>(tsteps.size());
        }
        return out;
    });

    ModulusReport rep;
    rep.replications = config.replications;
    rep.deltas = deltas;
    rep.delta_steps = dsteps;
    for (auto m : dsteps) rep.deltas_used.push_back(static_cast<double>(m) * dt);
    for (auto t : tsteps) rep.taus.push_back(static_cast<double>(t) * dt);
    for (std::size_t i = 0; i < dsteps.size(); ++i) {
        const auto sum = detail::summarize(detail::column(rows, i), i);
        rep.mean.push_back(sum.mean);
        rep.ci.push_back(sum.ci);
    }
    if (rep.deltas_used.size() >= 2 &&
        std::all_of(rep.mean.begin(), rep.mean.end(), [](double m) { return m > 0.0; })) {
        rep.fit = log_log_fit(rep.deltas_used, rep.mean);
    }
    rep.notes.emplace_back("deterministic start times stand in for stopping times");
    return rep;
}

// ---------------------------------------------------------------------------
// Mode moments of the linear part

struct ModeMomentRow {
    double epsilon = 0.0;
    std::vector<double> mean_abs_final;  // E|u_k(T)|
    std::vector<double> mean_sup;        // E sup_t |u_k(t)|
    LinearFit slope;                     // log E|u_k(T)| on log alpha_k, k >= 2
};

struct ModeMomentReport {
    std::size_t replications = 0;
    std::vector<double> eigenvalues;
    std::vector<double> weights;
    std::vector<double> sup_bound;  // alpha_k^{1/2} lambda_k + lambda_k + k^{-(1+gamma)} + k^{1+gamma} lambda_k^2
    std::vector<ModeMomentRow> rows;
    double normalized_ratio = 0.0;  // max/min of alpha_k^{1/2} E|u_k(T)| over (eps, k)
    double sup_bound_constant = 0.0;  // max_k E sup|u_k| / bound_k at the largest eps
    double sup_bound_excess = 0.0;    // max over (eps, k) of E sup|u_k| / (constant * bound_k)
};

[[nodiscard]] inline ModeMomentReport mode_moments(const SimConfig& config, std::vector<double> eps_grid) {
    const auto grid = checked_eps_grid(std::move(eps_grid));
    const SimConfig lin = linear_config(config);
    const BasisPtr basis = config.make_basis();
    const std::size_t K = config.modes;
    if (K < 3) throw std::invalid_argument("mode moment scaling needs K >= 3");

    const auto rows = run_replications(config.replications, config.workers, [&](std::size_t r) {
        const NoisePath path = detail::replication_path(lin, r);
        std::vector<double> out(grid.size() * 2 * K, 0.0);
        for (std::size_t e = 0; e < grid.size(); ++e) {
            SimConfig c = lin;
            c.epsilon = grid[e];
            WaveStepper w(c, basis, path);
            double* sup = out.data() + (2 * e + 1) * K;
            for (std::size_t n = 0; n < c.steps; ++n) {
                w.step();
                const auto u = w.u();
                for (std::size_t k = 0; k < K; ++k) sup[k] = std::max(sup[k], std::abs(u[k]));
            }
            double* fin = out.data() + 2 * e * K;
            for (std::size_t k = 0; k < K; ++k) fin[k] = std::abs(w.u()[k]);
        }
        return out;
    });

    ModeMomentReport rep;
    rep.replications = config.replications;
    const auto alpha = basis->eigenvalues();
    rep.eigenvalues.assign(alpha.begin(), alpha.end());
    rep.weights = config.noise.weights_for(K);
    const double g = config.noise.gamma;
    for (std::size_t k = 0; k < K; ++k) {
        const double kk = static_cast<double>(k + 1);
        const double l = rep.weights[k];
        rep.sup_bound.push_back(std::sqrt(alpha[k]) * l + l + std::pow(kk, -(1.0 + g)) + std::pow(kk, 1.0 + g) * l * l);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t e = 0; e < grid.size(); ++e) {
        ModeMomentRow row;
        row.epsilon = grid[e];
        for (std::size_t k = 0; k < K; ++k) {
            double fin = 0.0, sup = 0.0;
            for (const auto& r : rows) {
                fin += r[2 * e * K + k];
                sup += r[(2 * e + 1) * K + k];
            }
            row.mean_abs_final.push_back(fin / static_cast<double>(rows.size()));
            row.mean_sup.push_back(sup / static_cast<double>(rows.size()));
            const double normalized = std::sqrt(alpha[k]) * row.mean_abs_final.back();
            lo = std::min(lo, normalized);
            hi = std::max(hi, normalized);
        }
        row.slope = log_log_fit(std::span(rep.eigenvalues).subspan(1), std::span(row.mean_abs_final).subspan(1));
        rep.rows.push_back(std::move(row));
    }
    rep.normalized_ratio = hi / lo;
    for (std::size_t k = 0; k < K; ++k) {
        rep.sup_bound_constant = std::max(rep.sup_bound_constant, rep.rows.front().mean_sup[k] / rep.sup_bound[k]);
    }
    for (const auto& row : rep.rows) {
        for (std::size_t k = 0; k < K; ++k) {
            rep.sup_bound_excess =
                std::max(rep.sup_bound_excess, row.mean_sup[k] / (rep.sup_bound_constant * rep.sup_bound[k]));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gradient bound of the full solution

struct GradientReport {
    std::size_t replications = 0;
    std::vector<double> epsilons;
    std::vector<double> mean;  // E sup_t ||U^eps||_1
    std::vector<Interval> ci;
    double ratio = 0.0;  // max/min of the means
};

[[nodiscard]] inline GradientReport gradient_bound(const SimConfig& config, std::vector<double> eps_grid) {
    const auto grid = checked_eps_grid(std::move(eps_grid));
    const BasisPtr basis = config.make_basis();
    const auto rows = run_replications(config.replications, config.workers, [&](std::size_t r) {
        const NoisePath path = detail::replication_path(config, r);
        std::vector<double> out(grid.size());
        for (std::size_t e = 0; e < grid.size(); ++e) {
            SimConfig c = config;
            c.epsilon = grid[e];
            WaveStepper w(c, basis, path);
            double sup = sobolev_norm(*basis, w.u(), 1.0);
            for (std::size_t n = 0; n < c.steps; ++n) {
                w.step();
                sup = std::max(sup, sobolev_norm(*basis, w.u(), 1.0));
            }
            out[e] = sup;
        }
        return out;
    });
    GradientReport rep;
    rep.replications = config.replications;
    rep.epsilons = grid;
    for (std::size_t e = 0; e < grid.size(); ++e) {
        const auto sum = detail::summarize(detail::column(rows, e), e);
        rep.mean.push_back(sum.mean);
        rep.ci.push_back(sum.ci);
    }
    rep.ratio = *std::max_element(rep.mean.begin(), rep.mean.end()) /
                *std::min_element(rep.mean.begin(), rep.mean.end());
    return rep;
}

// ---------------------------------------------------------------------------
// Common random numbers

struct CouplingVariance {
    double shared = 0.0;       // sample variance with one path for wave and heat
    double independent = 0.0;  // heat driven by an unrelated path
};

[[nodiscard]] inline CouplingVariance coupling_variance(const SimConfig& config) {
    const BasisPtr basis = config.make_basis();
    const double s = config.theta == 0.0 ? -1.0 : -2.0;
    constexpr std::uint64_t independent_stream = 0x1d3e'0000'0000'0000ULL;
    const auto rows = run_replications(config.replications, config.workers, [&](std::size_t r) {
        const NoisePath path = detail::replication_path(config, r);
        const NoisePath other = make_path(config.noise, config.modes, config.steps, config.horizon,
                                          replication_seed(config.seed ^ independent_stream, r));
        std::vector<double> out(2);
        for (int pass = 0; pass < 2; ++pass) {
            WaveStepper w(config, basis, path);
            HeatStepper h(config, basis, pass == 0 ? path : other);
            double sup = 0.0;
            for (std::size_t n = 0; n < config.steps; ++n) {
                w.step();
                h.step();
                sup = std::max(sup, sobolev_distance(*basis, w.u(), h.u(), s));
            }
            out[static_cast<std::size_t>(pass)] = sup;
        }
        return out;
    });
    auto variance = [&](std::size_t c) {
        const auto col = detail::column(rows, c);
        const double se = standard_error(col);
        return se * se * static_cast<double>(col.size());
    };
    return {variance(0), variance(1)};
}

// ---------------------------------------------------------------------------
// Sampler diagnostics

struct EcfPoint {
    double h = 0.0;
    double empirical = 0.0;  // mean cos(h X)
    double exact = 0.0;      // exp(-|h|^alpha)
};

struct NoiseDiagnostics {
    double alpha = 0.0;
    std::size_t samples = 0;
    std::vector<EcfPoint> ecf;
    std::size_t aggregation_factor = 4;
    double ks_statistic = 0.0;  // m^{-1/alpha} (sum of m draws) against fresh draws
    double ks_critical = 0.0;   // 1% level
    double hill_index = 0.0;    // top 1%
    MomentReport first_moment;  // E|X|
};

/// `samples` standard draws for the characteristic function, Hill and moment
/// checks; `factor * samples` further draws for the aggregation test.
[[nodiscard]] inline NoiseDiagnostics noise_diagnostics(double alpha, std::size_t samples, std::uint64_t seed,
                                                        std::size_t factor = 4,
                                                        std::size_t resamples = default_bootstrap_resamples) {
    check_stability_index(alpha);
    if (samples < 100) throw std::invalid_argument("noise diagnostics need at least 100 samples");
    if (factor < 2) throw std::invalid_argument("aggregation factor must be at least 2");
    NoiseDiagnostics d;
    d.alpha = alpha;
    d.samples = samples;
    d.aggregation_factor = factor;

    const NoisePath direct = make_path(alpha, 1, samples, static_cast<double>(samples), seed);
    const auto x = direct.mode(0);
    for (double h : {0.5, 1.0, 2.0}) {
        double acc = 0.0;
        for (double v : x) acc += std::cos(h * v);
        d.ecf.push_back({h, acc / static_cast<double>(samples), std::exp(-std::pow(h, alpha))});
    }

    const std::size_t fine = factor * samples;
    const NoisePath sums = coarsen(make_path(alpha, 1, fine, static_cast<double>(fine), mix64(seed + 1)), factor);
    std::vector<double> aggregated(sums.mode(0).begin(), sums.mode(0).end());
    const double scale = std::pow(static_cast<double>(factor), -1.0 / alpha);
    for (double& v : aggregated) v *= scale;
    d.ks_statistic = ks_statistic(aggregated, {x.begin(), x.end()});
    d.ks_critical = ks_critical_value(samples, samples, 0.01);
    d.hill_index = hill_tail_index(x, 0.01);
    d.first_moment = fractional_moment(x, 1.0, alpha, resamples);
    return d;
}

// ---------------------------------------------------------------------------
// Serialization

inline void to_json(nlohmann::json& j, const RateReport& r) {
    j = {{"theta", r.theta},
         {"norm_index", r.norm_index},
         {"replications", r.replications},
         {"epsilons", r.epsilons},
         {"mean", r.mean},
         {"standard_error", r.standard_error},
         {"ci", r.ci},
         {"deltas", r.deltas},
         {"exceedance", r.exceedance},
         {"notes", r.notes}};
    j["fit"] = r.fit ? nlohmann::json(*r.fit) : nlohmann::json(nullptr);
}

inline void to_json(nlohmann::json& j, const ModulusReport& r) {
    j = {{"replications", r.replications}, {"deltas", r.deltas}, {"deltas_used", r.deltas_used},
         {"delta_steps", r.delta_steps},   {"taus", r.taus},     {"mean", r.mean},
         {"ci", r.ci},                     {"notes", r.notes}};
    j["fit"] = r.fit ? nlohmann::json(*r.fit) : nlohmann::json(nullptr);
}

inline void to_json(nlohmann::json& j, const ModeMomentRow& r) {
    j = {{"epsilon", r.epsilon}, {"mean_abs_final", r.mean_abs_final}, {"mean_sup", r.mean_sup}, {"slope", r.slope}};
}

inline void to_json(nlohmann::json& j, const ModeMomentReport& r) {
    j = {{"replications", r.replications},
         {"eigenvalues", r.eigenvalues},
         {"weights", r.weights},
         {"sup_bound", r.sup_bound},
         {"rows", r.rows},
         {"normalized_ratio", r.normalized_ratio},
         {"sup_bound_constant", r.sup_bound_constant},
         {"sup_bound_excess", r.sup_bound_excess}};
}

inline void to_json(nlohmann::json& j, const GradientReport& r) {
    j = {{"replications", r.replications}, {"epsilons", r.epsilons}, {"mean", r.mean},
         {"ci", r.ci},                     {"ratio", r.ratio}};
}

inline void to_json(nlohmann::json& j, const CouplingVariance& c) {
    j = {{"shared", c.shared}, {"independent", c.independent}};
}

inline void to_json(nlohmann::json& j, const EcfPoint& p) {
    j = {{"h", p.h}, {"empirical", p.empirical}, {"exact", p.exact}};
}

inline void to_json(nlohmann::json& j, const NoiseDiagnostics& d) {
    j = {{"alpha", d.alpha},
         {"samples", d.samples},
         {"ecf", d.ecf},
         {"aggregation_factor", d.aggregation_factor},
         {"ks_statistic", d.ks_statistic},
         {"ks_critical", d.ks_critical},
         {"hill_index", d.hill_index},
         {"first_moment", d.first_moment}};
}

inline void to_json(nlohmann::json& j, const SeriesCheck& s) {
    j = {{"name", s.name}, {"partial_sum", s.partial_sum}, {"decay_exponent", s.decay_exponent},
         {"converges", s.converges}};
    j["tail_estimate"] = std::isfinite(s.tail_estimate) ? nlohmann::json(s.tail_estimate) : nlohmann::json("inf");
}

inline void to_json(nlohmann::json& j, const A1Report& r) {
    j = {{"verdict", to_string(r.verdict)}, {"reasons", r.reasons}, {"terms", r.terms},
         {"first", r.first},                {"second", r.second},   {"side", r.side}};
    j["admissible_gamma"] = r.admissible_gamma
                                ? nlohmann::json::array({r.admissible_gamma->first, r.admissible_gamma->second})
                                : nlohmann::json(nullptr);
    j["recommended_modes"] = r.recommended_modes ? nlohmann::json(*r.recommended_modes) : nlohmann::json(nullptr);
}

// CSV tables. The first line names the table and its version.

inline void write_rate_csv(const RateReport& r, std::ostream& os) {
    os << fmt::format("# sklimit-rate v1 theta={} norm_index={} replications={}\n", r.theta, r.norm_index,
                      r.replications);
    os << "epsilon,mean,standard_error,ci_low,ci_high\n";
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
        os << fmt::format("{},{},{},{},{}\n", r.epsilons[e], r.mean[e], r.standard_error[e], r.ci[e].low,
                          r.ci[e].high);
    }
}

inline void write_exceedance_csv(const RateReport& r, std::ostream& os) {
    os << fmt::format("# sklimit-exceedance v1 norm_index={} replications={}\n", r.norm_index, r.replications);
    os << "epsilon,delta,probability\n";
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
        for (std::size_t i = 0; i < r.deltas.size(); ++i) {
            os << fmt::format("{},{},{}\n", r.epsilons[e], r.deltas[i], r.exceedance[e][i]);
        }
    }
}

inline void write_modulus_csv(const ModulusReport& r, std::ostream& os) {
    os << fmt::format("# sklimit-modulus v1 replications={}\n", r.replications);
    os << "delta,delta_used,mean,ci_low,ci_high\n";
    for (std::size_t i = 0; i < r.deltas.size(); ++i) {
        os << fmt::format("{},{},{},{},{}\n", r.deltas[i], r.deltas_used[i], r.mean[i], r.ci[i].low, r.ci[i].high);
    }
}

inline void write_moments_csv(const ModeMomentReport& r, std::ostream& os) {
    os << fmt::format("# sklimit-moments v1 replications={}\n", r.replications);
    os << "epsilon,mode,eigenvalue,mean_abs_final,mean_sup,sup_bound\n";
    for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
            os << fmt::format("{},{},{},{},{},{}\n", row.epsilon, k + 1, r.eigenvalues[k], row.mean_abs_final[k],
                              row.mean_sup[k], r.sup_bound[k]);
        }
    }
}

inline void write_gradient_csv(const GradientReport& r, std::ostream& os) {
    os << fmt::format("# sklimit-gradient v1 replications={}\n", r.replications);
    os << "epsilon,mean_sup_gradient,ci_low,ci_high\n";
    for (std::size_t e = 0; e < r.epsilons.size(); ++e) {
        os << fmt::format("{},{},{},{}\n", r.epsilons[e], r.mean[e], r.ci[e].low, r.ci[e].high);
    }
}

}  // namespace sklimit
