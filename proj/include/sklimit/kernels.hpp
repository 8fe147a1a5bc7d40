#pragma once

// Kernels of the damped mode oscillator
//
//   f' = g,             f(0) = 0,
//   eps g' = -a f - g,  g(0) = 1,
//
// with a = alpha_k > 0. The characteristic roots of eps r^2 + r + a = 0 are
// r = (-1 +- sqrt(1 - 4 a eps)) / (2 eps); the discriminant 1 - 4 a eps picks
// the regime. Everything is evaluated in real arithmetic.

#include "sklimit/errors.hpp"
#include "sklimit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sklimit {

/// |1 - 4 a eps| below this is treated as critical damping.
inline constexpr double critical_tolerance = 1e-8;

enum class DampingRegime { overdamped, critical, oscillatory };

struct GammaRegime {
    DampingRegime regime = DampingRegime::critical;
    double discriminant = 0.0;  // 1 - 4 a eps
    /// sqrt(disc)/(2 eps) when overdamped, sqrt(-disc)/(2 eps) when
    /// oscillatory, 0 when critical.
    double rate = 0.0;
};

[[nodiscard]] inline GammaRegime classify_gamma(double eps, double a) {
    if (!(eps > 0.0) || !(a > 0.0)) {
        throw std::invalid_argument("classify_gamma needs eps > 0 and alpha_k > 0");
    }
    GammaRegime g;
    g.discriminant = 1.0 - 4.0 * a * eps;
    if (std::abs(g.discriminant) < critical_tolerance) {
        g.regime = DampingRegime::critical;
        g.rate = 0.0;
    } else if (g.discriminant > 0.0) {
        g.regime = DampingRegime::overdamped;
        g.rate = std::sqrt(g.discriminant) / (2.0 * eps);
    } else {
        g.regime = DampingRegime::oscillatory;
        g.rate = std::sqrt(-g.discriminant) / (2.0 * eps);
    }
    return g;
}

struct KernelValues {
    double f = 0.0;
    double g = 0.0;
};

namespace detail {

// Overdamped branch through the slow root r1 = -2a/(1+s) and the gap
// r1 - r2 = s/eps, s = sqrt(disc); both forms avoid subtracting nearly equal
// exponentials.
inline KernelValues overdamped_kernels(double eps, double a, double disc, double t) {
    const double s = std::sqrt(disc);
    const double r1 = -2.0 * a / (1.0 + s);
    const double r2 = -(1.0 + s) / (2.0 * eps);
    const double gap = s / eps;
    const double e1 = std::exp(r1 * t);
    KernelValues k;
    if (gap * t > 1.0) {
        const double e2 = std::exp(r2 * t);
        k.f = (e1 - e2) / gap;
        k.g = (r1 * e1 - r2 * e2) / gap;
    } else {
        const double q = -std::expm1(-gap * t) / gap;  // (1 - e^{-gap t}) / gap
        k.f = e1 * q;
        k.g = e1 * (1.0 + r2 * q);
    }
    return k;
}

inline KernelValues oscillatory_kernels(double eps, double disc, double t) {
    const double omega = std::sqrt(-disc) / (2.0 * eps);
    const double m = -0.5 / eps;
    const double env = std::exp(m * t);
    const double sn = std::sin(omega * t) / omega;
    return {env * sn, env * (std::cos(omega * t) + m * sn)};
}

}  // namespace detail

/// (f, g) at time t >= 0. Near the critical manifold a three-term series in
/// q = (gamma t)^2 replaces the closed forms; the closed forms take over again
/// once |q| is no longer small.
[[nodiscard]] inline KernelValues kernels(double eps, double a, double t) {
    if (t < 0.0) throw std::invalid_argument("kernel time must be nonnegative");
    const GammaRegime reg = classify_gamma(eps, a);
    const double disc = reg.discriminant;
    const double q = disc * t * t / (4.0 * eps * eps);
    if (reg.regime == DampingRegime::critical && std::abs(q) < 0.05) {
        const double m = -0.5 / eps;
        const double env = std::exp(m * t);
        const double sinh_over = 1.0 + q / 6.0 + q * q / 120.0;  // sinh(x)/x
        const double cosh_series = 1.0 + q / 2.0 + q * q / 24.0;
        return {env * t * sinh_over, env * (cosh_series + m * t * sinh_over)};
    }
    if (disc > 0.0) return detail::overdamped_kernels(eps, a, disc, t);
    return detail::oscillatory_kernels(eps, disc, t);
}

[[nodiscard]] inline double f_kernel(double eps, double a, double t) { return kernels(eps, a, t).f; }
[[nodiscard]] inline double g_kernel(double eps, double a, double t) { return kernels(eps, a, t).g; }

/// Flow map of u' = v, eps v' = -a u - v over dt:
///   [u; v](t + dt) = P [u; v](t),   P = [[g + f/eps, f], [-a f/eps, g]].
struct Propagator {
    double uu = 1.0, uv = 0.0;
    double vu = 0.0, vv = 1.0;

    [[nodiscard]] double determinant() const noexcept { return uu * vv - uv * vu; }

    [[nodiscard]] std::array<double, 2> apply(double u, double v) const noexcept {
        return {uu * u + uv * v, vu * u + vv * v};
    }
};

[[nodiscard]] inline Propagator propagator(double eps, double a, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagator needs dt > 0");
    const KernelValues k = kernels(eps, a, dt);
    return {k.g + k.f / eps, k.f, -a * k.f / eps, k.g};
}

namespace detail {

// Points in (0, t) where |f| has a kink (zeros of f) or its first extremum.
inline std::vector<double> kernel_breakpoints(double eps, double a, double t) {
    std::vector<double> pts;
    const GammaRegime reg = classify_gamma(eps, a);
    if (reg.regime == DampingRegime::oscillatory) {
        const double omega = reg.rate;
        pts.push_back(std::atan(2.0 * eps * omega) / omega);
        for (double z = std::numbers::pi / omega; z < t; z += std::numbers::pi / omega) {
            pts.push_back(z);
        }
    } else if (reg.regime == DampingRegime::critical) {
        pts.push_back(2.0 * eps);
    } else {
        const double s = std::sqrt(reg.discriminant);
        const double r1 = -2.0 * a / (1.0 + s);
        const double r2 = -(1.0 + s) / (2.0 * eps);
        pts.push_back(std::log(r2 / r1) / (s / eps));
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> inside;
    for (double p : pts) {
        if (p > 0.0 && p < t) inside.push_back(p);
    }
    return inside;
}

/// Time past which int_t^inf |f/eps|^alpha < budget, from |f(s)| <= B e^{-kappa s}.
inline double kernel_tail_cutoff(double eps, double a, double alpha, double budget) {
    const GammaRegime reg = classify_gamma(eps, a);
    double B = 0.0, kappa = 0.0;
    if (reg.regime == DampingRegime::oscillatory) {
        B = 1.0 / reg.rate;
        kappa = 0.5 / eps;
    } else if (reg.regime == DampingRegime::critical) {
        B = 8.0 * eps / std::numbers::e;
        kappa = 0.25 / eps;
    } else {
        const double s = std::sqrt(reg.discriminant);
        const double r1 = -2.0 * a / (1.0 + s);
        const double r2 = -(1.0 + s) / (2.0 * eps);
        B = 1.0 / (r1 - r2);
        kappa = -r1;
    }
    const double lead = alpha * std::log(B / eps) - std::log(alpha * kappa * budget);
    return std::max(lead, 0.0) / (alpha * kappa);
}

}  // namespace detail

/// int_0^t |f(s)/eps|^alpha ds by adaptive Simpson, absolute tolerance `tol`,
/// with panels split at the first extremum of f and at its zeros. The decayed
/// tail past a fixed cutoff is dropped, so the value is constant beyond it.
/// Throws NumericalError if a panel does not converge.
[[nodiscard]] inline double kernel_alpha_integral(double eps, double a, double t, double alpha,
                                                  double tol = 1e-10) {
    if (t < 0.0) throw std::invalid_argument("kernel_alpha_integral needs t >= 0");
    if (t == 0.0) return 0.0;
    auto integrand = [&](double s) { return std::pow(std::abs(f_kernel(eps, a, s) / eps), alpha); };
    const double end = std::min(t, detail::kernel_tail_cutoff(eps, a, alpha, 1e-3 * tol));
    std::vector<double> edges{0.0};
    for (double p : detail::kernel_breakpoints(eps, a, end)) edges.push_back(p);
    edges.push_back(end);
    const double panel_tol = 0.999 * tol / static_cast<double>(edges.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        total += adaptive_simpson(integrand, edges[i], edges[i + 1], panel_tol).value;
    }
    return total;
}

}  // namespace sklimit
