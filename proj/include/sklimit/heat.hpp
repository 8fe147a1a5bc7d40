#pragma once

// Limiting stochastic heat equation U_t = Laplacian U + f(U) + eps^theta dL/dt,
// exponential Euler per mode with end-of-step noise, driven by the same
// NoisePath as the wave solver.

#include "sklimit/basis.hpp"
#include "sklimit/config.hpp"
#include "sklimit/errors.hpp"
#include "sklimit/noise_feed.hpp"
#include "sklimit/nonlinearity.hpp"
#include "sklimit/stable.hpp"
#include "sklimit/trajectory.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace sklimit {

class HeatStepper {
public:
    HeatStepper(const SimConfig& config, BasisPtr basis, const NoisePath& path)
        : basis_(std::move(basis)),
          feed_(path, config.modes, config.steps, config.horizon),
          nonlinearity_(config.nonlinearity, basis_),
          dt_(config.step_size()),
          noise_scale_(std::pow(config.epsilon, config.theta)),
          lambda_(config.noise.weights_for(config.modes)),
          u_(config.u0.coefficients(config.modes)),
          forcing_(config.modes, 0.0) {
        if (basis_->size() != config.modes) throw GridMismatchError("basis size differs from K");
        const auto alpha = basis_->eigenvalues();
        decay_.resize(config.modes);
        gain_.resize(config.modes);
        for (std::size_t k = 0; k < config.modes; ++k) {
            decay_[k] = std::exp(-alpha[k] * dt_);
            gain_[k] = -std::expm1(-alpha[k] * dt_) / alpha[k];  // (1 - e^{-a dt}) / a
        }
    }

    void step() {
        const std::size_t K = u_.size();
        if (!nonlinearity_.is_zero()) nonlinearity_(u_, forcing_);
        double norm = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double inc = feed_(k, n_);
            checksum_.add(inc);
            u_[k] = decay_[k] * u_[k] + gain_[k] * forcing_[k] + noise_scale_ * lambda_[k] * inc;
            norm += u_[k] * u_[k];
        }
        ++n_;
        if (!std::isfinite(norm)) throw NonFiniteStateError("heat solver state is not finite", n_);
    }

    [[nodiscard]] std::size_t step_index() const noexcept { return n_; }
    [[nodiscard]] double time() const noexcept { return static_cast<double>(n_) * dt_; }
    [[nodiscard]] std::span<const double> u() const noexcept { return u_; }
    [[nodiscard]] std::uint64_t noise_checksum() const noexcept { return checksum_.value(); }

private:
    BasisPtr basis_;
    NoiseFeed feed_;
    NonlinearityEvaluator nonlinearity_;
    double dt_;
    double noise_scale_;
    std::vector<double> lambda_;
    std::vector<double> decay_;
    std::vector<double> gain_;
    std::vector<double> u_;
    std::vector<double> forcing_;
    std::size_t n_ = 0;
    IncrementChecksum checksum_;
};

[[nodiscard]] inline FieldTrajectory solve_heat(const SimConfig& config, BasisPtr basis,
                                                const NoisePath& path) {
    HeatStepper stepper(config, basis, path);
    FieldTrajectory traj(config.modes, false);
    traj.provenance.kind = "heat";
    traj.provenance.seed = path.seed();
    traj.reserve(config.steps / config.stride + 2);
    auto record = [&] {
        traj.sup_gradient_norm = std::max(traj.sup_gradient_norm, sobolev_norm(*basis, stepper.u(), 1.0));
        traj.sup_l2_norm = std::max(traj.sup_l2_norm, sobolev_norm(*basis, stepper.u(), 0.0));
        if (stepper.step_index() % config.stride == 0 || stepper.step_index() == config.steps) {
            traj.push(stepper.time(), stepper.u());
        }
    };
    record();
    for (std::size_t n = 0; n < config.steps; ++n) {
        stepper.step();
        record();
    }
    return traj;
}

}  // namespace sklimit
