// f and g kernels of one mode across the three damping regimes.

#include "sklimit/kernels.hpp"

#include <fmt/format.h>

int main() {
    const double a = 9.0;
    for (double eps : {1.0, 0.25 / a, 0.01}) {
        const auto regime = sklimit::classify_gamma(eps, a);
        const char* name = regime.regime == sklimit::DampingRegime::overdamped  ? "overdamped"
                           : regime.regime == sklimit::DampingRegime::critical ? "critical"
                                                                                : "oscillatory";
        fmt::print("eps = {} ({})\n", eps, name);
        for (double t : {0.0, 0.1, 0.5, 1.0, 2.0}) {
            const auto k = sklimit::kernels(eps, a, t);
            fmt::print("  t = {:<4} f = {:+.10f}  g = {:+.10f}\n", t, k.f, k.g);
        }
    }
}
