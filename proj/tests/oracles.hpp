#pragma once

// Reference computations shared by the unit and acceptance tests. They avoid
// the library's closed forms.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Classical RK4 for u' = v, eps v' = -a u - v from (u0, v0); returns the state
/// at each requested time (ascending). The last partial step is shortened.
inline std::vector<std::array<double, 2>> rk4_mode(double eps, double a, double u0, double v0,
                                                   const std::vector<double>& times, double h) {
    auto rhs = [&](const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], (-a * y[0] - y[1]) / eps};
    };
    auto step = [&](std::array<double, 2>& y, double dt) {
        const auto k1 = rhs(y);
        const auto k2 = rhs({y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]});
        const auto k3 = rhs({y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]});
        const auto k4 = rhs({y[0] + dt * k3[0], y[1] + dt * k3[1]});
        y[0] += dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        y[1] += dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    };
    std::vector<std::array<double, 2>> out;
    std::array<double, 2> y{u0, v0};
    double t = 0.0;
    for (double target : times) {
        while (target - t > 1e-15) {
            const double dt = std::min(h, target - t);
            step(y, dt);
            t += dt;
        }
        out.push_back(y);
    }
    return out;
}

/// f and g: the (u, v) response to (0, 1), so f' = g and eps g' = -a f - g.
inline std::vector<std::array<double, 2>> rk4_kernels(double eps, double a, const std::vector<double>& times,
                                                      double h) {
    return rk4_mode(eps, a, 0.0, 1.0, times, h);
}

/// Composite 10-point Gauss-Legendre rule on `panels` equal panels.
inline double gauss_legendre(const std::function<double(double)>& f, double lo, double hi, int panels = 16) {
    static constexpr std::array<double, 5> x{0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                             0.8650633666889845, 0.9739065285171717};
    static constexpr std::array<double, 5> w{0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                             0.1494513491505806, 0.0666713443086881};
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        const double half = 0.5 * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            total += half * w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
        }
    }
    return total;
}

/// Two-sample KS statistic by brute force over every sample point.
inline double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
    auto ecdf = [](const std::vector<double>& s, double x) {
        double c = 0;
        for (double v : s) c += v <= x ? 1.0 : 0.0;
        return c / static_cast<double>(s.size());
    };
    double d = 0.0;
    for (const auto* s : {&a, &b}) {
        for (double x : *s) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
    }
    return d;
}

}  // namespace oracle
