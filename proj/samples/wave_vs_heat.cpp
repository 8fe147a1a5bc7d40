// One noise path, several masses: distance between the wave solution and its
// heat limit in H^-2.

#include "sklimit/sklimit.hpp"

#include <fmt/format.h>

int main() {
    sklimit::SimConfig config;
    config.theta = 0.5;
    const auto basis = config.make_basis();
    const auto path = sklimit::make_path(config.noise, config.modes, config.steps, config.horizon,
                                         sklimit::replication_seed(config.seed, 0));

    fmt::print("{:>8} {:>14}\n", "eps", "sup H^-2 dist");
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        config.epsilon = eps;
        const auto wave = sklimit::solve_wave(config, basis, path);
        const auto heat = sklimit::solve_heat(config, basis, path);
        fmt::print("{:>8} {:>14.6e}\n", eps, sklimit::pathwise_distance(wave, heat, *basis, -2.0));
    }
}
