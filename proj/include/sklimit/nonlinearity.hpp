#pragma once

#include "sklimit/basis.hpp"
#include "sklimit/config.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace sklimit {

/// Evaluates f(u) in spectral coordinates. Holds its own collocation
/// workspace, so one evaluator per thread.
class NonlinearityEvaluator {
public:
    NonlinearityEvaluator(const NonlinearitySpec& spec, BasisPtr basis)
        : spec_(spec), basis_(std::move(basis)) {
        if (spec_.kind == NonlinearityKind::sine) grid_.resize(basis_->grid_size());
    }

    [[nodiscard]] bool is_zero() const noexcept {
        return spec_.kind == NonlinearityKind::zero || spec_.lipschitz == 0.0;
    }

    void operator()(std::span<const double> u, std::span<double> out) {
        const double c = spec_.lipschitz;
        switch (spec_.kind) {
            case NonlinearityKind::zero:
                std::fill(out.begin(), out.end(), 0.0);
                return;
            case NonlinearityKind::diagonal:
                for (std::size_t k = 0; k < u.size(); ++k) {
                    out[k] = c * std::tanh(u[k]) / static_cast<double>(k + 1);
                }
                return;
            case NonlinearityKind::sine:
                basis_->to_physical(u, grid_);
                for (double& g : grid_) g = c * std::sin(g);
                basis_->from_physical(grid_, out);
                return;
        }
    }

private:
    NonlinearitySpec spec_;
    BasisPtr basis_;
    std::vector<double> grid_;
};

}  // namespace sklimit
