#pragma once

// Damped stochastic wave equation in spectral coordinates
//
//   U_t = V,
//   V_t = eps^{-1} [-V + Laplacian U + f(U)] + eps^{theta-1} dL/dt,
//
// stepped mode by mode. Per step of size dt: the linear part is propagated
// exactly, f(U_n) is frozen over the step and integrated exactly with it, and
// the noise increment is added to V at the end of the step.

#include "sklimit/basis.hpp"
#include "sklimit/config.hpp"
#include "sklimit/errors.hpp"
#include "sklimit/kernels.hpp"
#include "sklimit/noise_feed.hpp"
#include "sklimit/nonlinearity.hpp"
#include "sklimit/stable.hpp"
#include "sklimit/trajectory.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace sklimit {

class WaveStepper {
public:
    WaveStepper(const SimConfig& config, BasisPtr basis, const NoisePath& path)
        : basis_(std::move(basis)),
          feed_(path, config.modes, config.steps, config.horizon),
          nonlinearity_(config.nonlinearity, basis_),
          eps_(config.epsilon),
          dt_(config.step_size()),
          noise_scale_(std::pow(config.epsilon, config.theta - 1.0)),
          lambda_(config.noise.weights_for(config.modes)),
          u_(config.u0.coefficients(config.modes)),
          v_(config.v0.coefficients(config.modes)),
          forcing_(config.modes, 0.0) {
        if (basis_->size() != config.modes) throw GridMismatchError("basis size differs from K");
        const auto alpha = basis_->eigenvalues();
        propagators_.reserve(config.modes);
        for (std::size_t k = 0; k < config.modes; ++k) {
            propagators_.push_back(propagator(eps_, alpha[k], dt_));
        }
    }

    void step() {
        const auto alpha = basis_->eigenvalues();
        const std::size_t K = u_.size();
        if (!nonlinearity_.is_zero()) nonlinearity_(u_, forcing_);
        double norm = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const Propagator& P = propagators_[k];
            // Constant forcing f_k moves the rest point to (f_k / alpha_k, 0).
            const double rest = forcing_[k] / alpha[k];
            const double du = u_[k] - rest;
            const double inc = feed_(k, n_);
            checksum_.add(inc);
            const double u_new = P.uu * du + P.uv * v_[k] + rest;
            const double v_new = P.vu * du + P.vv * v_[k] + noise_scale_ * lambda_[k] * inc;
            u_[k] = u_new;
            v_[k] = v_new;
            norm += u_new * u_new + v_new * v_new;
        }
        ++n_;
        if (!std::isfinite(norm)) throw NonFiniteStateError("wave solver state is not finite", n_);
    }

    [[nodiscard]] std::size_t step_index() const noexcept { return n_; }
    [[nodiscard]] double time() const noexcept { return static_cast<double>(n_) * dt_; }
    [[nodiscard]] std::span<const double> u() const noexcept { return u_; }
    [[nodiscard]] std::span<const double> v() const noexcept { return v_; }
    /// f(U) used by the most recent step.
    [[nodiscard]] std::span<const double> forcing() const noexcept { return forcing_; }
    [[nodiscard]] const std::vector<Propagator>& propagators() const noexcept { return propagators_; }
    [[nodiscard]] std::uint64_t noise_checksum() const noexcept { return checksum_.value(); }
    [[nodiscard]] const Basis& basis() const noexcept { return *basis_; }

private:
    BasisPtr basis_;
    NoiseFeed feed_;
    NonlinearityEvaluator nonlinearity_;
    double eps_;
    double dt_;
    double noise_scale_;
    std::vector<double> lambda_;
    std::vector<Propagator> propagators_;
    std::vector<double> u_;
    std::vector<double> v_;
    std::vector<double> forcing_;
    std::size_t n_ = 0;
    IncrementChecksum checksum_;
};

namespace detail {

inline bool keep_step(std::size_t n, std::size_t N, std::size_t stride) {
    return n % stride == 0 || n == N;
}

}  // namespace detail

/// Full wave trajectory; saves every `config.stride`-th step plus the last.
[[nodiscard]] inline FieldTrajectory solve_wave(const SimConfig& config, BasisPtr basis,
                                                const NoisePath& path) {
    WaveStepper stepper(config, basis, path);
    FieldTrajectory traj(config.modes, true);
    traj.provenance.kind = "wave";
    traj.provenance.seed = path.seed();
    traj.reserve(config.steps / config.stride + 2);
    auto record = [&] {
        const double h1 = sobolev_norm(*basis, stepper.u(), 1.0);
        const double l2 = sobolev_norm(*basis, stepper.u(), 0.0);
        traj.sup_gradient_norm = std::max(traj.sup_gradient_norm, h1);
        traj.sup_l2_norm = std::max(traj.sup_l2_norm, l2);
        if (detail::keep_step(stepper.step_index(), config.steps, config.stride)) {
            traj.push(stepper.time(), stepper.u(), stepper.v());
        }
    };
    record();
    for (std::size_t n = 0; n < config.steps; ++n) {
        stepper.step();
        record();
    }
    return traj;
}

/// Config of the linear part: f = 0 and zero initial data.
[[nodiscard]] inline SimConfig linear_config(SimConfig config) {
    config.nonlinearity.kind = NonlinearityKind::zero;
    config.u0 = InitialData{};
    config.v0 = InitialData{};
    return config;
}

/// Solution of the wave equation with f = 0, u(0) = 0, u_t(0) = 0.
[[nodiscard]] inline FieldTrajectory linear_part(const SimConfig& config, BasisPtr basis,
                                                 const NoisePath& path) {
    auto traj = solve_wave(linear_config(config), std::move(basis), path);
    traj.provenance.kind = "linear";
    return traj;
}

// ---------------------------------------------------------------------------
// Velocity splitting  V = eps^{-1} V1 + V2 + eps^{theta + 1/alpha - 1} V3 with
//   V1' = -V1/eps,                          V1(0) = eps v0,
//   V2' = -(V2 - Laplacian U - f(U))/eps,   V2(0) = 0,
//   V3' = -V3/eps + eps^{-1/alpha} dL/dt,   V3(0) = 0.

/// Exact one-step weights of the V2 update. Over a step the solver's U
/// follows u(s) = rest + P_uu(s)(u_n - rest) + P_uv(s) v_n, so
///   V2_{n+1} = e^{-dt/eps} V2_n - (alpha_k/eps) [c_u (u_n - rest) + c_v v_n]
/// with c_u = int_0^dt e^{-(dt-s)/eps} P_uu(s) ds = f(dt) and
///      c_v = int_0^dt e^{-(dt-s)/eps} P_uv(s) ds = eps (e^{-dt/eps} - g(dt)) / alpha_k.
struct SplitWeights {
    double decay = 0.0;  // e^{-dt/eps}
    double c_u = 0.0;
    double c_v = 0.0;
};

[[nodiscard]] inline SplitWeights split_weights(double eps, double a, double dt) {
    const KernelValues k = kernels(eps, a, dt);
    const double decay = std::exp(-dt / eps);
    return {decay, k.f, eps * (decay - k.g) / a};
}

/// V1, V2, V3 along a wave trajectory saved at every step (stride 1) from the
/// same config and path.
[[nodiscard]] inline SplitTrajectory split_components(const SimConfig& config, BasisPtr basis,
                                                      const NoisePath& path,
                                                      const FieldTrajectory& wave) {
    const std::size_t K = config.modes;
    if (!wave.has_velocity() || wave.size() != config.steps + 1 || wave.modes() != K) {
        throw GridMismatchError("split_components needs the wave trajectory at every step");
    }
    const NoiseFeed feed(path, K, config.steps, config.horizon);
    const double eps = config.epsilon;
    const double dt = config.step_size();
    const double v3_noise = std::pow(eps, -1.0 / config.noise.alpha);
    const auto lambda = config.noise.weights_for(K);
    const auto alpha = basis->eigenvalues();

    std::vector<SplitWeights> w(K);
    for (std::size_t k = 0; k < K; ++k) w[k] = split_weights(eps, alpha[k], dt);

    SplitTrajectory out;
    out.modes = K;
    out.v0 = config.v0.coefficients(K);
    out.times.assign(wave.times().begin(), wave.times().end());
    out.v1_profile.resize(wave.size());
    for (std::size_t i = 0; i < wave.size(); ++i) out.v1_profile[i] = eps * std::exp(-out.times[i] / eps);
    out.v2.assign(wave.size() * K, 0.0);
    out.v3.assign(wave.size() * K, 0.0);

    NonlinearityEvaluator nonlinearity(config.nonlinearity, basis);
    std::vector<double> forcing(K, 0.0);
    for (std::size_t n = 0; n + 1 < wave.size(); ++n) {
        const auto u = wave.u(n);
        const auto v = wave.v(n);
        if (!nonlinearity.is_zero()) nonlinearity(u, forcing);
        const double* v2 = out.v2.data() + n * K;
        const double* v3 = out.v3.data() + n * K;
        double* v2n = out.v2.data() + (n + 1) * K;
        double* v3n = out.v3.data() + (n + 1) * K;
        for (std::size_t k = 0; k < K; ++k) {
            const double rest = forcing[k] / alpha[k];
            v2n[k] = w[k].decay * v2[k] - alpha[k] / eps * (w[k].c_u * (u[k] - rest) + w[k].c_v * v[k]);
            v3n[k] = w[k].decay * v3[k] + v3_noise * lambda[k] * feed(k, n);
        }
    }
    return out;
}

struct DecompositionCheck {
    double residual = 0.0;           // max_t || V - (V1/eps + V2 + c V3) ||_0
    double max_velocity_norm = 0.0;  // max_t || V ||_0
};

/// Splitting residual; `split_path` drives V3 and defaults to the wave's path.
[[nodiscard]] inline DecompositionCheck decomposition_residual(const SimConfig& config, BasisPtr basis,
                                                               const NoisePath& wave_path,
                                                               const NoisePath& split_path) {
    SimConfig full = config;
    full.stride = 1;
    const auto wave = solve_wave(full, basis, wave_path);
    const auto split = split_components(full, basis, split_path, wave);
    const double eps = config.epsilon;
    const double c3 = std::pow(eps, config.theta + 1.0 / config.noise.alpha - 1.0);
    const std::size_t K = config.modes;
    DecompositionCheck out;
    std::vector<double> diff(K);
    for (std::size_t i = 0; i < wave.size(); ++i) {
        const auto v = wave.v(i);
        const auto v2 = split.bar_v2(i);
        const auto v3 = split.bar_v3(i);
        for (std::size_t k = 0; k < K; ++k) {
            diff[k] = v[k] - (split.bar_v1(i, k) / eps + v2[k] + c3 * v3[k]);
        }
        out.residual = std::max(out.residual, sobolev_norm(*basis, diff, 0.0));
        out.max_velocity_norm = std::max(out.max_velocity_norm, sobolev_norm(*basis, v, 0.0));
    }
    return out;
}

[[nodiscard]] inline DecompositionCheck decomposition_residual(const SimConfig& config, BasisPtr basis,
                                                               const NoisePath& path) {
    return decomposition_residual(config, std::move(basis), path, path);
}

}  // namespace sklimit
