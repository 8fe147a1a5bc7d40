#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "refinement.hpp"
#include "sklimit/estimators.hpp"
#include "sklimit/heat.hpp"
#include "sklimit/wave.hpp"

#include <cmath>

using namespace sklimit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig small_config(std::size_t K = 8, std::size_t N = 512) {
    SimConfig c;
    c.modes = K;
    c.steps = N;
    c.horizon = 1.0;
    return c;
}

std::vector<double> zeros(std::size_t K) { return std::vector<double>(K, 0.0); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("noiseless single mode follows the damped oscillator", "[wave]") {
    auto c = small_config(4, 1000);
    c.epsilon = 1.0;
    c.nonlinearity.kind = NonlinearityKind::zero;
    c.noise.weights = zeros(4);
    c.u0 = {InitialKind::single_mode, 1, 1.0};
    const auto basis = c.make_basis();
    const auto path = make_path(c.noise, 4, 1000, 1.0, 3);
    const auto traj = solve_wave(c, basis, path);
    REQUIRE(traj.size() == 1001);
    std::vector<double> times(traj.times().begin() + 1, traj.times().end());
    const auto rk = oracle::rk4_mode(1.0, 1.0, 1.0, 0.0, times, 1e-4);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const auto k = kernels(1.0, 1.0, traj.time(i));
        CHECK_THAT(traj.u(i)[0], WithinAbs(k.g + k.f, 1e-10));
        CHECK_THAT(traj.v(i)[0], WithinAbs(-k.f, 1e-10));
        CHECK_THAT(traj.u(i)[0], WithinAbs(rk[i - 1][0], 1e-10));
        CHECK_THAT(traj.v(i)[0], WithinAbs(rk[i - 1][1], 1e-10));
        for (std::size_t m = 1; m < 4; ++m) CHECK(traj.u(i)[m] == 0.0);
    }
}

TEST_CASE("noiseless linear energy is nonincreasing", "[wave][property]") {
    for (double eps : {1.0, 0.1, 0.01}) {
        auto c = small_config(16, 2000);
        c.epsilon = eps;
        c.nonlinearity.kind = NonlinearityKind::zero;
        c.noise.weights = zeros(16);
        c.u0 = {InitialKind::power_law, 1, 1.0, 2.0};
        c.v0 = {InitialKind::single_mode, 3, 2.0};
        const auto basis = c.make_basis();
        const auto traj = solve_wave(c, basis, make_path(c.noise, 16, 2000, 1.0, 1));
        double prev = 1e300;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double h1 = sobolev_norm(*basis, traj.u(i), 1.0);
            const double l2 = sobolev_norm(*basis, traj.v(i), 0.0);
            const double energy = 0.5 * h1 * h1 + 0.5 * eps * l2 * l2;
            CHECK(energy <= prev * (1.0 + 1e-14));
            prev = energy;
        }
    }
}

TEST_CASE("terminal mode law matches the stochastic convolution", "[wave]") {
    // u_k(T) = (lambda_k / eps) sum_i f(T - t_{i+1}) dL_k[i] for the end-point rule.
    const std::size_t K = 3;
    const std::size_t N = 256;
    const std::size_t paths = 10000;
    auto c = small_config(K, N);
    c.epsilon = 0.1;
    c.nonlinearity.kind = NonlinearityKind::zero;
    c.u0 = {};
    c.noise.weights = std::vector<double>{0.5, 0.5, 0.5};
    const auto basis = c.make_basis();
    const double a = 9.0;
    std::vector<double> w(N);
    for (std::size_t i = 0; i < N; ++i) {
        w[i] = 0.5 / c.epsilon * f_kernel(c.epsilon, a, c.horizon - static_cast<double>(i + 1) / N);
    }
    std::vector<double> solver(paths), conv(paths), fresh(paths);
    double worst = 0.0;
    for (std::size_t p = 0; p < paths; ++p) {
        const auto path = make_path(c.noise, K, N, 1.0, replication_seed(99, p));
        WaveStepper s(c, basis, path);
        for (std::size_t n = 0; n < N; ++n) s.step();
        solver[p] = s.u()[2];
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) acc += w[i] * path.increment(2, i);
        conv[p] = acc;
        worst = std::max(worst, std::abs(solver[p] - acc) / (1.0 + std::abs(acc)));
        const auto other = make_path(c.noise, K, N, 1.0, replication_seed(100, p));
        double acc2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) acc2 += w[i] * other.increment(2, i);
        fresh[p] = acc2;
    }
    CHECK(worst < 1e-10);
    CHECK(ks_statistic(solver, conv) < ks_critical_value(paths, paths));
    CHECK(ks_statistic(solver, fresh) < ks_critical_value(paths, paths));
}

TEST_CASE("wave solver converges at first order under grid refinement", "[wave]") {
    auto c = small_config(16, 2048);
    c.epsilon = 0.1;
    c.noise.weights = PowerLawWeights{0.02, 2.0};
    const auto ratios = refine::median_ratios(c, {256, 512, 1024, 2048}, 200, 2718,
                                              [](const auto& cfg, const auto& b, const auto& p) {
                                                  return solve_wave(cfg, b, p);
                                              });
    for (double r : ratios) {
        INFO("ratio " << r);
        CHECK(r >= 1.6);
        CHECK(r <= 2.6);
    }
}

TEST_CASE("grid compatibility", "[wave]") {
    auto c = small_config(8, 64);
    const auto basis = c.make_basis();
    CHECK_NOTHROW(WaveStepper(c, basis, make_path(c.noise, 8, 128, 1.0, 1)));
    CHECK_THROWS_AS(WaveStepper(c, basis, make_path(c.noise, 8, 100, 1.0, 1)), GridMismatchError);
    CHECK_THROWS_AS(WaveStepper(c, basis, make_path(c.noise, 4, 64, 1.0, 1)), GridMismatchError);
    CHECK_THROWS_AS(WaveStepper(c, basis, make_path(c.noise, 8, 64, 2.0, 1)), GridMismatchError);
    CHECK_THROWS_AS(WaveStepper(c, make_box_basis(1, 4), make_path(c.noise, 8, 64, 1.0, 1)), GridMismatchError);
}

TEST_CASE("coarse solves consume summed fine increments", "[wave]") {
    auto c = small_config(8, 64);
    const auto basis = c.make_basis();
    const auto fine = make_path(c.noise, 8, 256, 1.0, 5);
    const auto a = solve_wave(c, basis, fine);
    const auto b = solve_wave(c, basis, coarsen(fine, 4));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a.u(i), b.u(i)) == 0.0);
}

TEST_CASE("non-finite states are reported with their step", "[wave]") {
    auto c = small_config(4, 64);
    c.noise.weights = std::vector<double>(4, 1e305);
    c.epsilon = 1e-3;
    const auto basis = c.make_basis();
    const auto path = make_path(c.noise, 4, 64, 1.0, 8);
    try {
        static_cast<void>(solve_wave(c, basis, path));
        FAIL("expected NonFiniteStateError");
    } catch (const NonFiniteStateError& e) {
        CHECK(e.step() >= 1);
        CHECK(e.step() <= 64);
    }
}

TEST_CASE("stride thins saved steps but not the running sups", "[wave]") {
    auto c = small_config(8, 100);
    const auto basis = c.make_basis();
    const auto path = make_path(c.noise, 8, 100, 1.0, 12);
    const auto full = solve_wave(c, basis, path);
    c.stride = 7;
    const auto thin = solve_wave(c, basis, path);
    CHECK(full.size() == 101);
    CHECK(thin.size() == 16);  // 0, 7, ..., 98 and the final step
    CHECK(thin.time(thin.size() - 1) == full.time(100));
    CHECK(thin.sup_gradient_norm == full.sup_gradient_norm);
    CHECK(thin.sup_l2_norm == full.sup_l2_norm);
    for (std::size_t i = 0; i + 1 < thin.size(); ++i) CHECK(max_abs_diff(thin.u(i), full.u(7 * i)) == 0.0);
}

TEST_CASE("linear part", "[wave]") {
    auto c = small_config(8, 400);
    c.u0 = {InitialKind::power_law, 1, 1.0, 2.0};
    c.v0 = {InitialKind::single_mode, 2, -1.0};
    const auto basis = c.make_basis();
    const auto path = make_path(c.noise, 8, 400, 1.0, 21);

    auto quiet = c;
    quiet.noise.weights = zeros(8);
    const auto none = linear_part(quiet, basis, path);
    for (std::size_t i = 0; i < none.size(); ++i) {
        for (double x : none.u(i)) CHECK(x == 0.0);
    }

    auto lin = c;
    lin.nonlinearity.kind = NonlinearityKind::zero;
    const auto full = solve_wave(lin, basis, path);
    const auto noise_only = linear_part(c, basis, path);
    auto noiseless = quiet;
    noiseless.nonlinearity.kind = NonlinearityKind::zero;
    const auto deterministic = solve_wave(noiseless, basis, path);
    for (std::size_t i = 0; i < full.size(); ++i) {
        for (std::size_t k = 0; k < 8; ++k) {
            CHECK_THAT(full.u(i)[k], WithinAbs(noise_only.u(i)[k] + deterministic.u(i)[k], 1e-10));
        }
    }

    const auto nonlinear = solve_wave(c, basis, path);
    const auto u0 = c.u0.coefficients(8);
    for (std::size_t k = 0; k < 8; ++k) CHECK(nonlinear.u(0)[k] - noise_only.u(0)[k] == u0[k]);
}

TEST_CASE("velocity split components", "[wave][split]") {
    auto c = small_config(8, 1000);
    c.epsilon = 0.1;
    c.v0 = {InitialKind::single_mode, 1, 1.0};
    const auto basis = c.make_basis();
    const auto path = make_path(c.noise, 8, 1000, 1.0, 4);
    const auto wave = solve_wave(c, basis, path);
    const auto split = split_components(c, basis, path, wave);
    REQUIRE(split.size() == wave.size());
    CHECK(split.times == std::vector<double>(wave.times().begin(), wave.times().end()));

    CHECK_THAT(split.bar_v1(100, 0), WithinAbs(0.1 * std::exp(-1.0), 1e-15));
    CHECK_THAT(split.bar_v1(100, 0), WithinAbs(0.0367879, 1e-7));
    CHECK(split.bar_v1(100, 1) == 0.0);

    CHECK(split.bar_v1(0, 0) == c.epsilon);
    for (double x : split.bar_v2(0)) CHECK(x == 0.0);
    for (double x : split.bar_v3(0)) CHECK(x == 0.0);

    auto quiet = c;
    quiet.noise.weights = zeros(8);
    const auto qwave = solve_wave(quiet, basis, path);
    const auto qsplit = split_components(quiet, basis, path, qwave);
    for (double x : qsplit.v3) CHECK(x == 0.0);

    auto thin = c;
    thin.stride = 2;
    CHECK_THROWS_AS(split_components(c, basis, path, solve_wave(thin, basis, path)), GridMismatchError);
}

TEST_CASE("splitting identity holds at the discrete level", "[wave][split]") {
    SECTION("linear dynamics") {
        for (double eps : {1.0, 0.1, 0.01}) {
            auto c = small_config(16, 2048);
            c.epsilon = eps;
            c.theta = 0.3;
            c.nonlinearity.kind = NonlinearityKind::zero;
            c.v0 = {InitialKind::power_law, 1, 1.0, 1.0};
            const auto basis = c.make_basis();
            const auto r = decomposition_residual(c, basis, make_path(c.noise, 16, 2048, 1.0, 6));
            CHECK(r.residual < 1e-10 * (1.0 + r.max_velocity_norm));
        }
    }
    SECTION("sine nonlinearity") {
        auto c = small_config(32, 2048);
        c.epsilon = 0.05;
        c.v0 = {InitialKind::single_mode, 2, 0.5};
        const auto basis = c.make_basis();
        const auto r = decomposition_residual(c, basis, make_path(c.noise, 32, 2048, 1.0, 7));
        CHECK(r.residual < 1e-10 * (1.0 + r.max_velocity_norm));
    }
    SECTION("mismatched seeds break it") {
        auto c = small_config(32, 2048);
        c.epsilon = 0.05;
        const auto basis = c.make_basis();
        const auto r = decomposition_residual(c, basis, make_path(c.noise, 32, 2048, 1.0, 7),
                                              make_path(c.noise, 32, 2048, 1.0, 8));
        CHECK(r.residual > 0.1);
    }
}

TEST_CASE("wave and heat consume identical increments", "[wave][heat]") {
    auto c = small_config(8, 128);
    const auto basis = c.make_basis();
    const auto path = make_path(c.noise, 8, 256, 1.0, 77);
    WaveStepper w(c, basis, path);
    HeatStepper h(c, basis, path);
    for (std::size_t n = 0; n < 128; ++n) {
        w.step();
        h.step();
    }
    CHECK(w.noise_checksum() == h.noise_checksum());
    WaveStepper other(c, basis, make_path(c.noise, 8, 256, 1.0, 78));
    other.step();
    CHECK(other.noise_checksum() != w.noise_checksum());
}
