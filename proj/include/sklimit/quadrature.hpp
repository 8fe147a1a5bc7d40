#pragma once

#include "sklimit/errors.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace sklimit {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

template <class F>
void simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                  double tol, int depth, int max_depth, QuadratureResult& out) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    out.evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    // Force two levels so a symmetric integrand cannot fake convergence.
    if (depth >= 2 && std::abs(diff) <= 15.0 * tol) {
        out.value += left + right + diff / 15.0;
        out.error += std::abs(diff) / 15.0;
        return;
    }
    if (depth >= max_depth) {
        throw NumericalError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth, out);
    simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction; `tol` is absolute.
/// Throws NumericalError when `max_depth` bisections do not reach `tol`.
template <class F>
[[nodiscard]] QuadratureResult adaptive_simpson(const F& f, double a, double b, double tol,
                                                int max_depth = 50) {
    QuadratureResult out;
    if (b <= a) return out;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    out.evaluations = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 0, max_depth, out);
    return out;
}

}  // namespace sklimit
