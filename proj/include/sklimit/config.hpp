#pragma once

// Run configuration shared by the wave and heat solvers.

#include "sklimit/basis.hpp"
#include "sklimit/stable.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sklimit {

enum class NonlinearityKind { zero, diagonal, sine };

/// f : H -> H.
///  - zero:     f = 0
///  - diagonal: f_k(u) = c tanh(u_k) / k  (Lipschitz c, ||f|| <= c pi/sqrt(6))
///  - sine:     f(u)(x) = c sin(u(x))     (Lipschitz c, ||f|| <= c |D|^{1/2})
struct NonlinearitySpec {
    NonlinearityKind kind = NonlinearityKind::sine;
    double lipschitz = 0.5;
    /// Growth exponent delta of ||f(x)|| <= C (1 + ||x||^{delta/2}). Both
    /// presets are bounded, so any delta in (0, alpha) holds; kept as metadata.
    double growth_exponent = 1.0;
};

enum class InitialKind { zero, single_mode, power_law };

/// Spectral initial data: zero, amplitude * e_mode, or amplitude * k^-exponent.
struct InitialData {
    InitialKind kind = InitialKind::zero;
    std::size_t mode = 1;
    double amplitude = 1.0;
    double exponent = 2.0;

    [[nodiscard]] std::vector<double> coefficients(std::size_t K) const {
        std::vector<double> c(K, 0.0);
        switch (kind) {
            case InitialKind::zero: break;
            case InitialKind::single_mode:
                if (mode < 1 || mode > K) {
                    throw std::invalid_argument("initial data mode " + std::to_string(mode) +
                                                " outside 1.." + std::to_string(K));
                }
                c[mode - 1] = amplitude;
                break;
            case InitialKind::power_law:
                for (std::size_t k = 0; k < K; ++k) {
                    c[k] = amplitude * std::pow(static_cast<double>(k + 1), -exponent);
                }
                break;
        }
        return c;
    }
};

struct SimConfig {
    // domain
    int dimension = 1;
    std::size_t modes = 32;
    std::size_t collocation = 0;  // 0: twice the largest axis index

    // noise
    NoiseSpec noise{1.5, PowerLawWeights{0.01, 5.0}, 1.5};

    // dynamics
    double epsilon = 0.1;
    double theta = 0.0;
    NonlinearitySpec nonlinearity{};
    InitialData u0{InitialKind::single_mode, 1, 1.0, 2.0};
    InitialData v0{};

    // run
    double horizon = 1.0;
    std::size_t steps = 8192;
    std::uint64_t seed = 1;
    std::size_t stride = 1;
    std::size_t replications = 200;
    std::size_t workers = 1;

    [[nodiscard]] double step_size() const noexcept {
        return horizon / static_cast<double>(steps);
    }

    /// Range checks; messages name the assumption a violation breaks.
    void validate() const {
        if (dimension < 1 || dimension > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
        if (modes < 1) throw std::invalid_argument("K must be at least 1");
        noise.validate();
        if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0,1]");
        if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in [0,1)");
        if (!(nonlinearity.lipschitz >= 0.0) || !std::isfinite(nonlinearity.lipschitz)) {
            throw std::invalid_argument("nonlinearity constant c must be finite and >= 0 (A2)");
        }
        if (!(nonlinearity.growth_exponent > 0.0 && nonlinearity.growth_exponent < noise.alpha)) {
            throw std::invalid_argument("growth exponent delta must lie in (0, alpha) (A3)");
        }
        const double inv_d = 1.0 / dimension;
        for (const auto* data : {&u0, &v0}) {
            const bool is_u = data == &u0;
            if (!std::isfinite(data->amplitude)) {
                throw std::invalid_argument(std::string(is_u ? "u0" : "v0") + " amplitude must be finite (A4)");
            }
            if (data->kind == InitialKind::single_mode && (data->mode < 1 || data->mode > modes)) {
                throw std::invalid_argument(std::string(is_u ? "u0" : "v0") + " mode must lie in 1..K");
            }
            if (data->kind == InitialKind::power_law) {
                // sum_k alpha_k^s k^{-2p} with alpha_k ~ k^{2/d}; s = 1 for u0, 0 for v0.
                const double s = is_u ? 1.0 : 0.0;
                if (!(2.0 * data->exponent - 2.0 * s * inv_d > 1.0)) {
                    throw std::invalid_argument(is_u ? "u0 power law is not in H^1_0 (A4)"
                                                     : "v0 power law is not in L^2 (A4)");
                }
            }
        }
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("T must be positive");
        if (steps < 1) throw std::invalid_argument("N must be at least 1");
        if (stride < 1) throw std::invalid_argument("stride must be at least 1");
        if (replications < 1) throw std::invalid_argument("replications must be at least 1");
        if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    }

    [[nodiscard]] BasisPtr make_basis() const { return make_box_basis(dimension, modes, collocation); }
};

}  // namespace sklimit
