#pragma once

// Symmetric alpha-stable sampling and cylindrical noise paths.
//
// A NoisePath stores per-mode increments of independent normalized
// alpha-stable Levy processes L_k on a uniform grid. The weights lambda_k are
// not part of the path; solvers apply them, so one path drives every weight
// preset.

#include "sklimit/basis.hpp"
#include "sklimit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sklimit {

inline void check_stability_index(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw std::invalid_argument("alpha must lie in (1,2)");
    }
}

/// Chambers-Mallows-Stuck transform of two uniforms on (0,1) into a draw with
/// characteristic function exp(-|h|^alpha). Mirroring u1 -> 1 - u1 negates
/// the result.
[[nodiscard]] inline double standard_stable_from_uniforms(double alpha, double u1, double u2) {
    const double v = std::numbers::pi * (u1 - 0.5);
    const double w = -std::log(u2);
    const double inv_alpha = 1.0 / alpha;
    return std::sin(alpha * v) / std::pow(std::cos(v), inv_alpha) *
           std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) * inv_alpha);
}

/// One standard symmetric alpha-stable draw. Consumes two engine outputs.
[[nodiscard]] inline double sample_standard_stable(double alpha, Engine& rng) {
    check_stability_index(alpha);
    const double u1 = uniform_open(rng);
    const double u2 = uniform_open(rng);
    return standard_stable_from_uniforms(alpha, u1, u2);
}

/// lambda_k = scale * k^(-exponent).
struct PowerLawWeights {
    double scale = 1.0;
    double exponent = 5.0;
};

struct NoiseSpec {
    double alpha = 1.5;
    std::variant<PowerLawWeights, std::vector<double>> weights = PowerLawWeights{};
    double gamma = 1.5;  // exponent of the (A1) side condition

    [[nodiscard]] bool is_power_law() const noexcept {
        return std::holds_alternative<PowerLawWeights>(weights);
    }

    /// lambda_1..lambda_K. An explicit list must hold at least K entries.
    [[nodiscard]] std::vector<double> weights_for(std::size_t K) const {
        std::vector<double> out(K);
        if (const auto* p = std::get_if<PowerLawWeights>(&weights)) {
            for (std::size_t k = 0; k < K; ++k) {
                out[k] = p->scale * std::pow(static_cast<double>(k + 1), -p->exponent);
            }
        } else {
            const auto& list = std::get<std::vector<double>>(weights);
            if (list.size() < K) {
                throw std::invalid_argument("noise weight list has " + std::to_string(list.size()) +
                                            " entries, " + std::to_string(K) + " modes requested");
            }
            std::copy_n(list.begin(), K, out.begin());
        }
        return out;
    }

    void validate() const {
        check_stability_index(alpha);
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw std::invalid_argument("gamma must be positive (A1)");
        }
        if (const auto* p = std::get_if<PowerLawWeights>(&weights)) {
            if (!(p->scale > 0.0) || !std::isfinite(p->scale) || !(p->exponent > 0.0) ||
                !std::isfinite(p->exponent)) {
                throw std::invalid_argument("power-law noise weights need c > 0 and beta > 0 (A1)");
            }
        } else {
            for (double w : std::get<std::vector<double>>(weights)) {
                if (!(w > 0.0) || !std::isfinite(w)) {
                    throw std::invalid_argument("noise weights lambda_k must be positive (A1)");
                }
            }
        }
    }
};

/// Increments Delta L_k[i] of K independent standard alpha-stable processes
/// on t_i = i T / N. Each increment has scale (T/N)^(1/alpha).
class NoisePath {
public:
    NoisePath(double alpha, double horizon, std::size_t modes, std::size_t steps,
              std::uint64_t seed, std::vector<double> increments)
        : alpha_(alpha), horizon_(horizon), modes_(modes), steps_(steps), seed_(seed),
          increments_(std::move(increments)) {
        if (increments_.size() != modes_ * steps_) {
            throw std::invalid_argument("noise increment matrix has the wrong size");
        }
    }

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] std::size_t modes() const noexcept { return modes_; }
    [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] double step_size() const noexcept {
        return horizon_ / static_cast<double>(steps_);
    }

    /// Increments of mode k (0-based).
    [[nodiscard]] std::span<const double> mode(std::size_t k) const {
        return {increments_.data() + k * steps_, steps_};
    }

    [[nodiscard]] double increment(std::size_t k, std::size_t i) const {
        return increments_[k * steps_ + i];
    }

    /// L_k(T), summed in step order.
    [[nodiscard]] double endpoint(std::size_t k) const {
        const auto m = mode(k);
        return std::accumulate(m.begin(), m.end(), 0.0);
    }

    [[nodiscard]] const std::vector<double>& raw() const noexcept { return increments_; }

    friend bool operator==(const NoisePath&, const NoisePath&) = default;

private:
    double alpha_;
    double horizon_;
    std::size_t modes_;
    std::size_t steps_;
    std::uint64_t seed_;
    std::vector<double> increments_;
};

/// Path with K modes and N steps on [0, T]. Mode k draws from an engine seeded
/// with mode_stream_seed(seed, k).
[[nodiscard]] inline NoisePath make_path(double alpha, std::size_t modes, std::size_t steps,
                                         double horizon, std::uint64_t seed) {
    check_stability_index(alpha);
    if (steps < 1) throw std::invalid_argument("noise path needs N >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("noise path needs T > 0");
    const double scale = std::pow(horizon / static_cast<double>(steps), 1.0 / alpha);
    std::vector<double> inc(modes * steps);
    for (std::size_t k = 0; k < modes; ++k) {
        Engine rng(mode_stream_seed(seed, k));
        double* out = inc.data() + k * steps;
        for (std::size_t i = 0; i < steps; ++i) {
            const double u1 = uniform_open(rng);
            const double u2 = uniform_open(rng);
            out[i] = scale * standard_stable_from_uniforms(alpha, u1, u2);
        }
    }
    return {alpha, horizon, modes, steps, seed, std::move(inc)};
}

[[nodiscard]] inline NoisePath make_path(const NoiseSpec& spec, std::size_t modes,
                                         std::size_t steps, double horizon, std::uint64_t seed) {
    return make_path(spec.alpha, modes, steps, horizon, seed);
}

/// Sum of `factor` consecutive increments, accumulated left to right.
[[nodiscard]] inline double coarse_increment(const NoisePath& path, std::size_t k,
                                             std::size_t coarse_step, std::size_t factor) {
    const double* p = path.mode(k).data() + coarse_step * factor;
    double acc = 0.0;
    for (std::size_t j = 0; j < factor; ++j) acc += p[j];
    return acc;
}

[[nodiscard]] inline NoisePath coarsen(const NoisePath& path, std::size_t factor) {
    if (factor == 0 || path.steps() % factor != 0) {
        throw std::invalid_argument("coarsening factor " + std::to_string(factor) +
                                    " does not divide N = " + std::to_string(path.steps()));
    }
    const std::size_t n = path.steps() / factor;
    std::vector<double> inc(path.modes() * n);
    for (std::size_t k = 0; k < path.modes(); ++k) {
        for (std::size_t i = 0; i < n; ++i) inc[k * n + i] = coarse_increment(path, k, i, factor);
    }
    return {path.alpha(), path.horizon(), path.modes(), n, path.seed(), std::move(inc)};
}

/// FNV-1a over the IEEE bit patterns of a sequence of increments; used to
/// confirm that two consumers saw bit-identical noise.
class IncrementChecksum {
public:
    void add(double x) noexcept {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &x, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            state_ ^= (bits >> (8 * b)) & 0xffU;
            state_ *= 0x100000001b3ULL;
        }
    }
    [[nodiscard]] std::uint64_t value() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// ---------------------------------------------------------------------------
// Path export / import

inline void write_path_csv(const NoisePath& path, std::ostream& os) {
    os << fmt::format("# sklimit-noise-path v1 alpha={} T={} K={} N={} seed={}\n", path.alpha(),
                      path.horizon(), path.modes(), path.steps(), path.seed());
    os << "mode,step,increment\n";
    for (std::size_t k = 0; k < path.modes(); ++k) {
        for (std::size_t i = 0; i < path.steps(); ++i) {
            os << fmt::format("{},{},{}\n", k + 1, i, path.increment(k, i));
        }
    }
}

[[nodiscard]] inline NoisePath read_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# sklimit-noise-path v1", 0) != 0) {
        throw std::runtime_error("noise path CSV: missing 'sklimit-noise-path v1' header");
    }
    double alpha = 0, horizon = 0;
    std::size_t K = 0, N = 0;
    std::uint64_t seed = 0;
    {
        std::istringstream meta(line.substr(std::string("# sklimit-noise-path v1").size()));
        std::string tok;
        while (meta >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const auto key = tok.substr(0, eq);
            const auto val = tok.substr(eq + 1);
            if (key == "alpha") alpha = std::stod(val);
            else if (key == "T") horizon = std::stod(val);
            else if (key == "K") K = std::stoull(val);
            else if (key == "N") N = std::stoull(val);
            else if (key == "seed") seed = std::stoull(val);
        }
    }
    if (!std::getline(is, line) || line != "mode,step,increment") {
        throw std::runtime_error("noise path CSV: expected column header 'mode,step,increment'");
    }
    std::vector<double> inc(K * N, 0.0);
    std::vector<bool> seen(K * N, false);
    std::size_t row = 2;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::size_t mode = 0, step = 0;
        double value = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> mode >> c1 >> step >> c2) || c1 != ',' || c2 != ',') {
            throw std::runtime_error("noise path CSV: malformed row " + std::to_string(row));
        }
        std::string rest;
        ls >> rest;
        value = std::stod(rest);
        if (mode < 1 || mode > K || step >= N) {
            throw std::runtime_error("noise path CSV: row " + std::to_string(row) + " out of range");
        }
        inc[(mode - 1) * N + step] = value;
        seen[(mode - 1) * N + step] = true;
    }
    for (bool s : seen) {
        if (!s) throw std::runtime_error("noise path CSV: missing increments");
    }
    return {alpha, horizon, K, N, seed, std::move(inc)};
}

namespace detail {
inline constexpr char path_magic[8] = {'S', 'K', 'L', 'N', 'O', 'I', 'S', 'E'};
}

/// Flat little-endian binary: magic, u32 version, u64 K, u64 N, f64 alpha,
/// f64 T, u64 seed, then K*N f64 increments (mode-major).
inline void write_path_binary(const NoisePath& path, std::ostream& os) {
    const std::uint32_t version = 1;
    const std::uint64_t K = path.modes(), N = path.steps(), seed = path.seed();
    const double alpha = path.alpha(), horizon = path.horizon();
    os.write(detail::path_magic, 8);
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    os.write(reinterpret_cast<const char*>(&K), sizeof K);
    os.write(reinterpret_cast<const char*>(&N), sizeof N);
    os.write(reinterpret_cast<const char*>(&alpha), sizeof alpha);
    os.write(reinterpret_cast<const char*>(&horizon), sizeof horizon);
    os.write(reinterpret_cast<const char*>(&seed), sizeof seed);
    os.write(reinterpret_cast<const char*>(path.raw().data()),
             static_cast<std::streamsize>(path.raw().size() * sizeof(double)));
}

[[nodiscard]] inline NoisePath read_path_binary(std::istream& is) {
    char magic[8];
    std::uint32_t version = 0;
    std::uint64_t K = 0, N = 0, seed = 0;
    double alpha = 0, horizon = 0;
    is.read(magic, 8);
    if (!is || std::memcmp(magic, detail::path_magic, 8) != 0) {
        throw std::runtime_error("noise path binary: bad magic");
    }
    is.read(reinterpret_cast<char*>(&version), sizeof version);
    if (version != 1) throw std::runtime_error("noise path binary: unsupported version");
    is.read(reinterpret_cast<char*>(&K), sizeof K);
    is.read(reinterpret_cast<char*>(&N), sizeof N);
    is.read(reinterpret_cast<char*>(&alpha), sizeof alpha);
    is.read(reinterpret_cast<char*>(&horizon), sizeof horizon);
    is.read(reinterpret_cast<char*>(&seed), sizeof seed);
    std::vector<double> inc(K * N);
    is.read(reinterpret_cast<char*>(inc.data()),
            static_cast<std::streamsize>(inc.size() * sizeof(double)));
    if (!is) throw std::runtime_error("noise path binary: truncated file");
    return {alpha, horizon, K, N, seed, std::move(inc)};
}

// ---------------------------------------------------------------------------
// (A1) checker

enum class Verdict { pass, fail, inconclusive };

[[nodiscard]] inline const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct SeriesCheck {
    std::string name;
    double partial_sum = 0.0;
    double decay_exponent = 0.0;  // terms ~ k^(-decay_exponent)
    bool converges = false;
    double tail_estimate = 0.0;   // +inf when divergent
};

struct A1Report {
    Verdict verdict = Verdict::inconclusive;
    std::vector<std::string> reasons;
    std::size_t terms = 0;
    SeriesCheck first;   // sum alpha_k^{3/2} lambda_k
    SeriesCheck second;  // sum alpha_k^{1/2} k^{1+gamma} lambda_k^2
    SeriesCheck side;    // sum alpha_k^{1/2} k^{-(1+gamma)}
    std::optional<std::pair<double, double>> admissible_gamma;  // open interval
    std::optional<double> recommended_modes;  // tail < 1e-6 of the partial sums
};

namespace detail {

// Unit-ball volume; Weyl asymptotics on (0,pi)^d give alpha_k ~ (2^d k / omega_d)^{2/d}.
inline double unit_ball_volume(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return std::numbers::pi;
        default: return 4.0 * std::numbers::pi / 3.0;
    }
}

inline double weyl_coefficient(int d) {
    return std::pow(std::pow(2.0, d) / unit_ball_volume(d), 2.0 / d);
}

// Least-squares slope of log(term) against log(k) over the upper half.
inline double fitted_decay(std::span<const double> terms) {
    const std::size_t n = terms.size();
    const std::size_t start = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = start; i < n; ++i) {
        if (!(terms[i] > 0.0)) continue;
        const double x = std::log(static_cast<double>(i + 1));
        const double y = std::log(terms[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    const auto dm = static_cast<double>(m);
    const double slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    return -slope;
}

}  // namespace detail

/// Checks (A1): for the given gamma,
///   sum_k alpha_k^{1/2} k^{-(1+gamma)} < inf   and
///   sum_k (alpha_k^{3/2} lambda_k + alpha_k^{1/2} k^{1+gamma} lambda_k^2) < inf.
/// Partial sums run over the basis modes with exact eigenvalues. Power-law
/// weights are decided by p-series comparison with alpha_k ~ k^{2/d};
/// explicit lists only get an empirical decay fit (pass or inconclusive).
[[nodiscard]] inline A1Report validate_A1(const NoiseSpec& spec, const Basis& basis) {
    A1Report r;
    const int d = basis.dimension();
    const std::size_t K = basis.size();
    const auto alpha_k = basis.eigenvalues();
    const double g = spec.gamma;
    r.terms = K;

    std::vector<double> lam;
    if (spec.is_power_law()) {
        lam = spec.weights_for(K);
    } else {
        const auto& list = std::get<std::vector<double>>(spec.weights);
        lam.assign(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(std::min(K, list.size())));
    }
    const std::size_t n = lam.size();
    std::vector<double> t1(n), t2(n), t3(K);
    for (std::size_t i = 0; i < n; ++i) {
        const double kk = static_cast<double>(i + 1);
        t1[i] = std::pow(alpha_k[i], 1.5) * lam[i];
        t2[i] = std::sqrt(alpha_k[i]) * std::pow(kk, 1.0 + g) * lam[i] * lam[i];
    }
    for (std::size_t i = 0; i < K; ++i) {
        t3[i] = std::sqrt(alpha_k[i]) * std::pow(static_cast<double>(i + 1), -(1.0 + g));
    }
    r.first = {"sum alpha_k^{3/2} lambda_k", std::accumulate(t1.begin(), t1.end(), 0.0), 0, false, 0};
    r.second = {"sum alpha_k^{1/2} k^{1+gamma} lambda_k^2", std::accumulate(t2.begin(), t2.end(), 0.0),
                0, false, 0};
    r.side = {"sum alpha_k^{1/2} k^{-(1+gamma)}", std::accumulate(t3.begin(), t3.end(), 0.0), 0, false, 0};

    const double inv_d = 1.0 / d;
    const double weyl = detail::weyl_coefficient(d);
    const double inf = std::numeric_limits<double>::infinity();

    // Tail of sum_{k>K} C k^{-p} bounded by C K^{1-p} / (p - 1).
    auto finish = [&](SeriesCheck& s, double coeff) {
        s.converges = s.decay_exponent > 1.0;
        s.tail_estimate = s.converges ? coeff * std::pow(static_cast<double>(K), 1.0 - s.decay_exponent) /
                                            (s.decay_exponent - 1.0)
                                      : inf;
    };
    auto modes_needed = [&](const SeriesCheck& s, double coeff) {
        const double target = 1e-6 * std::max(s.partial_sum, std::numeric_limits<double>::min());
        return std::pow(coeff / ((s.decay_exponent - 1.0) * target), 1.0 / (s.decay_exponent - 1.0));
    };

    r.side.decay_exponent = 1.0 + g - inv_d;
    const double side_coeff = std::sqrt(weyl);
    finish(r.side, side_coeff);
    if (!r.side.converges) {
        r.reasons.push_back(fmt::format(
            "A1 side condition diverges: alpha_k^{{1/2}} k^{{-(1+gamma)}} ~ k^{{{:.4g}}} (needs gamma > 1/d = {:.4g})",
            -r.side.decay_exponent, inv_d));
    }

    if (const auto* p = std::get_if<PowerLawWeights>(&spec.weights)) {
        const double beta = p->exponent;
        const double c = p->scale;
        r.first.decay_exponent = beta - 3.0 * inv_d;
        r.second.decay_exponent = 2.0 * beta - inv_d - 1.0 - g;
        const double c1 = std::pow(weyl, 1.5) * c;
        const double c2 = std::sqrt(weyl) * c * c;
        finish(r.first, c1);
        finish(r.second, c2);
        if (!r.first.converges) {
            r.reasons.push_back(fmt::format(
                "A1 first summand diverges: alpha_k^{{3/2}} lambda_k ~ k^{{{:.4g}}}", -r.first.decay_exponent));
        }
        if (!r.second.converges) {
            r.reasons.push_back(fmt::format(
                "A1 second summand diverges: alpha_k^{{1/2}} k^{{1+gamma}} lambda_k^2 ~ k^{{{:.4g}}}",
                -r.second.decay_exponent));
        }
        const double lo = inv_d;
        const double hi = 2.0 * beta - inv_d - 2.0;
        if (r.first.converges && hi > lo) r.admissible_gamma = std::make_pair(lo, hi);

        if (r.first.converges && r.second.converges && r.side.converges) {
            r.verdict = Verdict::pass;
            r.reasons.push_back(fmt::format(
                "A1 holds: terms decay like k^{{{:.4g}}}, k^{{{:.4g}}}; side condition k^{{{:.4g}}}",
                -r.first.decay_exponent, -r.second.decay_exponent, -r.side.decay_exponent));
            r.recommended_modes = std::max({modes_needed(r.first, c1), modes_needed(r.second, c2),
                                            modes_needed(r.side, side_coeff)});
        } else {
            r.verdict = Verdict::fail;
            if (r.side.converges == false && r.admissible_gamma) {
                r.reasons.push_back(fmt::format("gamma in ({:.4g}, {:.4g}) would satisfy A1",
                                                r.admissible_gamma->first, r.admissible_gamma->second));
            }
        }
        return r;
    }

    // Explicit list: empirical decay of the finite partial-sum terms.
    r.first.decay_exponent = detail::fitted_decay(t1);
    r.second.decay_exponent = detail::fitted_decay(t2);
    r.first.converges = r.first.decay_exponent > 1.0;
    r.second.converges = r.second.decay_exponent > 1.0;
    // No analytic tail for an explicit list.
    const double unknown = std::numeric_limits<double>::quiet_NaN();
    r.first.tail_estimate = r.first.converges ? unknown : inf;
    r.second.tail_estimate = r.second.converges ? unknown : inf;
    if (n < K) {
        r.reasons.push_back(fmt::format("weight list covers {} of {} modes", n, K));
    }
    if (!r.side.converges) {
        r.verdict = Verdict::fail;
    } else if (r.first.converges && r.second.converges && n >= 8) {
        r.verdict = Verdict::pass;
        r.reasons.push_back(fmt::format("empirical decay k^{{{:.3g}}} and k^{{{:.3g}}} over the listed modes",
                                        -r.first.decay_exponent, -r.second.decay_exponent));
    } else {
        r.verdict = Verdict::inconclusive;
        r.reasons.push_back("explicit weight list: partial sums only, decay too slow or too few terms to decide");
    }
    return r;
}

}  // namespace sklimit
