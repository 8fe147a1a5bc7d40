#pragma once

#include "sklimit/basis.hpp"
#include "sklimit/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace sklimit {

struct Provenance {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string kind;  // "wave", "heat", "linear"
};

/// Spectral coefficients of U (and optionally V) at saved times.
class FieldTrajectory {
public:
    FieldTrajectory(std::size_t modes, bool with_velocity)
        : modes_(modes), with_velocity_(with_velocity) {}

    void push(double t, std::span<const double> u, std::span<const double> v = {}) {
        if (!times_.empty() && !(t > times_.back())) {
            throw std::invalid_argument("trajectory times must increase strictly");
        }
        if (u.size() != modes_ || (with_velocity_ && v.size() != modes_)) {
            throw GridMismatchError("trajectory state has the wrong number of modes");
        }
        times_.push_back(t);
        u_.insert(u_.end(), u.begin(), u.end());
        if (with_velocity_) v_.insert(v_.end(), v.begin(), v.end());
    }

    void reserve(std::size_t saved) {
        times_.reserve(saved);
        u_.reserve(saved * modes_);
        if (with_velocity_) v_.reserve(saved * modes_);
    }

    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] std::size_t modes() const noexcept { return modes_; }
    [[nodiscard]] bool has_velocity() const noexcept { return with_velocity_; }
    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] double time(std::size_t i) const { return times_.at(i); }
    [[nodiscard]] std::span<const double> u(std::size_t i) const {
        return {u_.data() + i * modes_, modes_};
    }
    [[nodiscard]] std::span<const double> v(std::size_t i) const {
        if (!with_velocity_) throw std::logic_error("trajectory stores no velocity");
        return {v_.data() + i * modes_, modes_};
    }
    [[nodiscard]] std::span<const double> final_u() const { return u(size() - 1); }

    Provenance provenance;
    /// Running sups over every step, including steps dropped by the stride.
    double sup_gradient_norm = 0.0;  // sup_t ||U||_1
    double sup_l2_norm = 0.0;        // sup_t ||U||_0

private:
    std::size_t modes_;
    bool with_velocity_;
    std::vector<double> times_;
    std::vector<double> u_;
    std::vector<double> v_;
};

/// Components of the split velocity on the wave trajectory's grid:
/// V1(t) = profile(t) * v0 with profile(t) = eps e^{-t/eps}, and V2, V3 per mode.
struct SplitTrajectory {
    std::vector<double> times;
    std::vector<double> v0;
    std::vector<double> v1_profile;
    std::vector<double> v2;  // saved x K
    std::vector<double> v3;  // saved x K
    std::size_t modes = 0;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] std::span<const double> bar_v2(std::size_t i) const {
        return {v2.data() + i * modes, modes};
    }
    [[nodiscard]] std::span<const double> bar_v3(std::size_t i) const {
        return {v3.data() + i * modes, modes};
    }
    [[nodiscard]] double bar_v1(std::size_t i, std::size_t k) const { return v1_profile[i] * v0[k]; }
};

inline void check_same_grid(const FieldTrajectory& a, const FieldTrajectory& b) {
    if (a.size() != b.size() || a.modes() != b.modes()) {
        throw GridMismatchError("trajectories have different grids");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.time(i) != b.time(i)) throw GridMismatchError("trajectories have different save times");
    }
}

// ---------------------------------------------------------------------------
// Export

inline constexpr const char* trajectory_csv_header = "time,mode,u_k,v_k";

/// One row per (saved time, mode). v_k is empty when no velocity is stored.
inline void write_trajectory_csv(const FieldTrajectory& traj, std::ostream& os) {
    os << fmt::format("# sklimit-trajectory v1 kind={} config_hash={} seed={}\n",
                      traj.provenance.kind, traj.provenance.config_hash, traj.provenance.seed);
    os << trajectory_csv_header << '\n';
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto u = traj.u(i);
        for (std::size_t k = 0; k < traj.modes(); ++k) {
            if (traj.has_velocity()) {
                os << fmt::format("{},{},{},{}\n", traj.time(i), k + 1, u[k], traj.v(i)[k]);
            } else {
                os << fmt::format("{},{},{},\n", traj.time(i), k + 1, u[k]);
            }
        }
    }
}

[[nodiscard]] inline nlohmann::json trajectory_to_json(const FieldTrajectory& traj) {
    nlohmann::json j;
    j["format"] = "sklimit-trajectory";
    j["version"] = 1;
    j["kind"] = traj.provenance.kind;
    j["config_hash"] = traj.provenance.config_hash;
    j["seed"] = traj.provenance.seed;
    j["modes"] = traj.modes();
    j["times"] = std::vector<double>(traj.times().begin(), traj.times().end());
    auto& u = j["u"] = nlohmann::json::array();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        u.push_back(std::vector<double>(traj.u(i).begin(), traj.u(i).end()));
    }
    if (traj.has_velocity()) {
        auto& v = j["v"] = nlohmann::json::array();
        for (std::size_t i = 0; i < traj.size(); ++i) {
            v.push_back(std::vector<double>(traj.v(i).begin(), traj.v(i).end()));
        }
    }
    j["sup_gradient_norm"] = traj.sup_gradient_norm;
    j["sup_l2_norm"] = traj.sup_l2_norm;
    return j;
}

}  // namespace sklimit
