#pragma once

// Heavy-tail aware Monte Carlo statistics.

#include "sklimit/basis.hpp"
#include "sklimit/errors.hpp"
#include "sklimit/random.hpp"
#include "sklimit/trajectory.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sklimit {

inline constexpr std::size_t default_bootstrap_resamples = 499;
inline constexpr std::uint64_t default_bootstrap_seed = 0xb007'57a9'0000'0001ULL;

[[nodiscard]] inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

[[nodiscard]] inline double standard_error(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

/// Linear-interpolation quantile of sorted data.
[[nodiscard]] inline double sorted_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Basic (reverse-percentile) bootstrap interval for the mean, widened if
/// needed so that it contains the point estimate.
[[nodiscard]] inline Interval bootstrap_mean_ci(std::span<const double> x,
                                                std::size_t resamples = default_bootstrap_resamples,
                                                std::uint64_t seed = default_bootstrap_seed,
                                                double level = 0.95) {
    const double est = mean(x);
    const std::size_t n = x.size();
    Engine rng(seed);
    std::vector<double> means(resamples);
    for (auto& m : means) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += x[uniform_index(rng, n)];
        m = acc / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double a = 0.5 * (1.0 - level);
    Interval ci{2.0 * est - sorted_quantile(means, 1.0 - a), 2.0 * est - sorted_quantile(means, a)};
    ci.low = std::min(ci.low, est);
    ci.high = std::max(ci.high, est);
    return ci;
}

struct MomentReport {
    double estimate = 0.0;
    std::size_t count = 0;
    Interval ci;
    double order = 1.0;  // p
    double standard_error = 0.0;
    std::vector<std::string> warnings;
};

/// Mean of |x|^p with a bootstrap interval. Requires 0 < p < alpha: for
/// p >= alpha the moment of an alpha-stable law is infinite.
[[nodiscard]] inline MomentReport fractional_moment(std::span<const double> samples, double p,
                                                    double alpha,
                                                    std::size_t resamples = default_bootstrap_resamples,
                                                    std::uint64_t seed = default_bootstrap_seed) {
    if (samples.empty()) throw std::invalid_argument("fractional_moment needs samples");
    if (!(p > 0.0)) throw std::invalid_argument("moment order p must be positive");
    if (!(p < alpha)) {
        throw std::invalid_argument("moment order p must be below alpha (infinite moment otherwise)");
    }
    std::vector<double> powered(samples.size());
    std::transform(samples.begin(), samples.end(), powered.begin(),
                   [p](double x) { return std::pow(std::abs(x), p); });
    MomentReport r;
    r.order = p;
    r.count = samples.size();
    r.estimate = mean(powered);
    r.standard_error = standard_error(powered);
    r.ci = bootstrap_mean_ci(powered, resamples, seed);
    if (p > 0.5 * alpha) {
        r.warnings.emplace_back("p > alpha/2: |x|^p has infinite variance, interval is unreliable");
    }
    if (samples.size() < 100) r.warnings.emplace_back("fewer than 100 samples");
    return r;
}

/// Hill estimate of the tail index from the top `top_fraction` order
/// statistics of |x|.
[[nodiscard]] inline double hill_tail_index(std::span<const double> samples, double top_fraction) {
    if (samples.size() < 100) throw std::invalid_argument("Hill estimator needs at least 100 samples");
    if (!(top_fraction > 0.0 && top_fraction <= 0.2)) {
        throw std::invalid_argument("Hill top fraction must lie in (0, 0.2]");
    }
    std::vector<double> a(samples.size());
    std::transform(samples.begin(), samples.end(), a.begin(), [](double x) { return std::abs(x); });
    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(top_fraction * static_cast<double>(a.size())));
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end(), std::greater<>());
    const double threshold = a[k];
    if (!(threshold > 0.0)) throw std::invalid_argument("Hill estimator: degenerate samples");
    const double log_threshold = std::log(threshold);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(a[i]) - log_threshold;
    if (!(acc > 0.0)) throw std::invalid_argument("Hill estimator: degenerate samples");
    return static_cast<double>(k) / acc;
}

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
[[nodiscard]] inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Asymptotic two-sample critical value c(level) sqrt((n + m) / (n m)),
/// c(level) = sqrt(-ln(level / 2) / 2).
[[nodiscard]] inline double ks_critical_value(std::size_t n, std::size_t m, double level = 0.01) {
    const double c = std::sqrt(-0.5 * std::log(0.5 * level));
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

/// Ordinary least squares y = intercept + slope x.
[[nodiscard]] inline LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("least squares needs two equal-length series of >= 2 points");
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("least squares: x values are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f.residuals[i] = y[i] - (f.intercept + f.slope * x[i]);
    return f;
}

/// Slope of log y against log x.
[[nodiscard]] inline LinearFit log_log_fit(std::span<const double> x, std::span<const double> y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return ols_fit(lx, ly);
}

/// max over saved times of ||a(t) - b(t)||_s.
[[nodiscard]] inline double pathwise_distance(const FieldTrajectory& a, const FieldTrajectory& b,
                                              const Basis& basis, double s) {
    check_same_grid(a, b);
    std::vector<double> diff(a.modes());
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ua = a.u(i);
        const auto ub = b.u(i);
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = ua[k] - ub[k];
        sup = std::max(sup, sobolev_norm(basis, diff, s));
    }
    return sup;
}

/// ||a - b||_s for two coefficient vectors.
[[nodiscard]] inline double sobolev_distance(const Basis& basis, std::span<const double> a,
                                             std::span<const double> b, double s) {
    const auto alpha = basis.eigenvalues();
    double acc = 0.0;
    if (s == -1.0) {
        for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]) / alpha[k];
    } else if (s == -2.0) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            acc += (a[k] - b[k]) * (a[k] - b[k]) / (alpha[k] * alpha[k]);
        }
    } else {
        for (std::size_t k = 0; k < a.size(); ++k) acc += std::pow(alpha[k], s) * (a[k] - b[k]) * (a[k] - b[k]);
    }
    return std::sqrt(acc);
}

inline void to_json(nlohmann::json& j, const Interval& ci) { j = nlohmann::json::array({ci.low, ci.high}); }

inline void to_json(nlohmann::json& j, const MomentReport& r) {
    j = {{"estimate", r.estimate}, {"count", r.count},       {"ci", r.ci},
         {"order", r.order},       {"standard_error", r.standard_error}, {"warnings", r.warnings}};
}

inline void to_json(nlohmann::json& j, const LinearFit& f) {
    j = {{"slope", f.slope}, {"intercept", f.intercept}, {"residuals", f.residuals}};
}

}  // namespace sklimit
