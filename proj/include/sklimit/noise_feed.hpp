#pragma once

#include "sklimit/errors.hpp"
#include "sklimit/stable.hpp"

#include <cmath>
#include <string>

namespace sklimit {

/// Serves step increments of a NoisePath on a grid of N steps, where N divides
/// the path's own step count. Coarse increments are summed exactly as
/// coarsen() sums them.
class NoiseFeed {
public:
    NoiseFeed(const NoisePath& path, std::size_t modes, std::size_t steps, double horizon)
        : path_(&path) {
        if (path.modes() < modes) {
            throw GridMismatchError("noise path has " + std::to_string(path.modes()) +
                                    " modes, solver needs " + std::to_string(modes));
        }
        if (steps == 0 || path.steps() % steps != 0) {
            throw GridMismatchError("solver step count " + std::to_string(steps) +
                                    " does not divide the path's " + std::to_string(path.steps()));
        }
        if (std::abs(path.horizon() - horizon) > 1e-12 * horizon) {
            throw GridMismatchError("noise path horizon differs from the solver horizon");
        }
        factor_ = path.steps() / steps;
    }

    [[nodiscard]] double operator()(std::size_t k, std::size_t step) const {
        if (factor_ == 1) return path_->increment(k, step);
        return coarse_increment(*path_, k, step, factor_);
    }

    [[nodiscard]] std::size_t factor() const noexcept { return factor_; }
    [[nodiscard]] const NoisePath& path() const noexcept { return *path_; }

private:
    const NoisePath* path_;
    std::size_t factor_ = 1;
};

}  // namespace sklimit
