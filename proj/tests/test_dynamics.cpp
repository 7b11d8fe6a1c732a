#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "qbath/analysis.hpp"
#include "qbath/dynamics.hpp"
#include "qbath/errors.hpp"
#include "qbath/modes.hpp"
#include "qbath/potentials.hpp"
#include "test_support.hpp"

using namespace qbath;

namespace {

PhasePoint ground_sample(const BathRealization& bath, const SystemParams& params, std::uint64_t seed,
                         double q0, double p0) {
    const GroundState gs = build_ground_state(params, bath);
    PhasePoint s = sample_ground_state(gs, seed, 1)[0];
    s.q = q0;
    s.p = p0;
    return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Fourth-order central differences.
template <class F>
double d1(F&& f, double t, double h) {
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}
template <class F>
double d2(F&& f, double t, double h) {
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h);
}

}  // namespace

TEST_CASE("bare oscillator") {
    const SystemParams p{1.0, 0.1, 0.5, 0.5};
    PhasePoint s;
    s.q = 1.0;
    s.p = 0.3;
    const Trajectory full = integrate_full_hamiltonian(s, p, BathRealization{}, 1e-3, 10.0);
    REQUIRE(full.size() == 10001);
    double err = 0.0;
    for (std::size_t k = 0; k < full.size(); ++k) {
        const double t = full.time(k);
        err = std::max(err, std::abs(full.q[k] - (std::cos(t) + 0.3 * std::sin(t))));
    }
    CHECK(err < 1e-8);

    // zero couplings leave the system alone
    const BathRealization silent = BathRealization::from_modes({0.5, 1.2}, {0.0, 0.0});
    PhasePoint s2 = PhasePoint::zeros(2);
    s2.q = 1.0;
    s2.x = {0.4, -0.2};
    const Trajectory decoupled = integrate_full_hamiltonian(s2, p, silent, 1e-3, 10.0);
    double err2 = 0.0;
    for (std::size_t k = 0; k < decoupled.size(); ++k) {
        err2 = std::max(err2, std::abs(decoupled.q[k] - std::cos(decoupled.time(k))));
    }
    CHECK(err2 < 1e-8);

    const Trajectory gle = integrate_gle(1.0, 0.3, silent, p, std::nullopt, 1e-3, 10.0);
    double err3 = 0.0;
    for (std::size_t k = 0; k < gle.size(); ++k) {
        const double t = gle.time(k);
        err3 = std::max(err3, std::abs(gle.q[k] - (std::cos(t) + 0.3 * std::sin(t))));
    }
    CHECK(err3 < 1e-8);
}

TEST_CASE("energy conservation and time reversal") {
    const auto [bath, params] = test::kernel_bath(64, 1.0, 1.5, 1.0);
    const PhasePoint s = ground_sample(bath, params, 1, 1.0, 0.0);
    const double e0 = total_energy(s, params, bath);
    const PhasePoint end = evolve_full_hamiltonian(s, params, bath, 1e-3, 20000);
    CHECK(std::abs(total_energy(end, params, bath) - e0) / std::abs(e0) < 1e-6);

    PhasePoint back = end;
    back.p = -back.p;
    for (double& v : back.p_bath) v = -v;
    PhasePoint home = evolve_full_hamiltonian(back, params, bath, 1e-3, 20000);
    double err = std::abs(home.q - s.q) + std::abs(home.p + s.p);
    for (std::size_t a = 0; a < bath.size(); ++a) {
        err = std::max(err, std::abs(home.x[a] - s.x[a]));
        err = std::max(err, std::abs(home.p_bath[a] + s.p_bath[a]));
    }
    CHECK(err < 1e-6);
}

TEST_CASE("resonant single mode follows the two-mode analytic solution") {
    const double gamma = 0.05;
    const BathRealization bath = BathRealization::from_modes({1.0}, {gamma});
    const SystemParams params{1.0, 0.1, 0.5, 0.5};
    PhasePoint s = PhasePoint::zeros(1);
    s.q = 1.0;
    const Trajectory traj = integrate_full_hamiltonian(s, params, bath, 1e-2, 130.0);

    // exact solution from the eigen-decomposition of the potential matrix
    Eigen::Matrix2d k;
    k << 1.0 + gamma * gamma, -gamma, -gamma, 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(k);
    const Eigen::Vector2d y0 = eig.eigenvectors().transpose() * Eigen::Vector2d(1.0, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.time(i);
        Eigen::Vector2d y;
        for (int m = 0; m < 2; ++m) y(m) = y0(m) * std::cos(std::sqrt(eig.eigenvalues()(m)) * t);
        err = std::max(err, std::abs((eig.eigenvectors() * y)(0) - traj.q[i]));
    }
    CHECK(err < 1e-6);

    // beat: near-complete transfer to the mode at half the beat period
    const ModePair m = mode_frequencies(rotation_angle(1.0 + gamma * gamma, 1.0, gamma),
                                        1.0 + gamma * gamma, 1.0, gamma);
    const double beat = 2.0 * std::numbers::pi / m.delta;
    const double eig_beat =
        2.0 * std::numbers::pi / (std::sqrt(eig.eigenvalues()(1)) - std::sqrt(eig.eigenvalues()(0)));
    CHECK(beat == doctest::Approx(eig_beat).epsilon(0.01));
    const std::size_t half = static_cast<std::size_t>(std::llround(0.5 * beat / traj.dt));
    double window = 0.0;
    for (std::size_t i = half - 100; i <= half + 100; ++i) window = std::max(window, std::abs(traj.q[i]));
    CHECK(window < 0.06);
}

TEST_CASE("classical noise") {
    const BathRealization bath = BathRealization::from_modes({0.5, 1.0, 2.0}, {0.1, 0.2, 0.3});
    const double q0 = 0.7;
    std::vector<double> x0 = {0.07, 0.14, 0.21}, p0 = {0.0, 0.0, 0.0};
    for (double t : {0.0, 1.0, 3.7}) CHECK(std::abs(classical_noise(x0, p0, q0, bath, t)) < 1e-16);

    x0 = {0.3, -0.1, 0.2};
    p0 = {0.5, 0.5, -1.0};
    double at0 = 0.0;
    for (int a = 0; a < 3; ++a) {
        at0 += bath.gamma[a] * bath.omega[a] * bath.omega[a] * (x0[a] - bath.gamma[a] * q0);
    }
    CHECK(classical_noise(x0, p0, q0, bath, 0.0) == doctest::Approx(at0).epsilon(1e-15));
    CHECK(classical_noise(x0, p0, q0, bath, 2.0, 2.0) == doctest::Approx(at0).epsilon(1e-15));
}

TEST_CASE("noise has zero ground-state mean") {
    const auto [bath, params] = test::cubic_bath(16, 1.0, 1.5, 0.5);
    const GroundState gs = build_ground_state(params, bath);
    const auto samples = sample_ground_state(gs, 9, 10000);
    std::vector<double> r(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        r[i] = classical_noise(samples[i].x, samples[i].p_bath, samples[i].q, bath, 1.0);
    }
    const MeanEstimate est = estimate_mean(r);
    CHECK(std::abs(est.mean) < 4.0 * est.std_error);
}

TEST_CASE("GLE reproduces the full Hamiltonian dynamics") {
    const auto [bath, params] = test::kernel_bath(64, 1.0, 1.5, 1.0);
    const PhasePoint s = ground_sample(bath, params, 4, 1.0, 0.0);
    const Trajectory full = integrate_full_hamiltonian(s, params, bath, 1e-3, 20.0);
    const Trajectory gle = integrate_gle(s.q, s.p, bath, params, s, 1e-3, 20.0);
    REQUIRE(full.size() == gle.size());
    CHECK(test::rel_l2(full.q, gle.q) < 1e-3);

    // truncated memory still tracks when the window covers the run
    GleOptions opt;
    opt.memory_time = 25.0;
    const Trajectory windowed = integrate_gle(s.q, s.p, bath, params, s, 1e-3, 20.0, opt);
    CHECK(windowed.q == gle.q);

    const Trajectory again = integrate_gle(s.q, s.p, bath, params, s, 1e-3, 20.0);
    CHECK(again.q == gle.q);
}

TEST_CASE("Markov kernel matches the analytic quantum solution") {
    const SystemParams params{1.0, 0.1, 0.5, 0.5};
    GleOptions opt;
    opt.kernel = KernelModel::markov;
    const Trajectory gle = integrate_gle(1.0, 0.0, BathRealization{}, params, std::nullopt, 1e-3, 10.0, opt);
    CHECK(gle.label == Method::markov_quantum);
    const Trajectory exact =
        sample_analytic(LangevinParams::from_initial(1.0, 0.5, 1.0, 0.0), 1e-3, 10.0, Method::quantum);
    CHECK(max_abs_diff(gle.q, exact.q) < 1e-6);
    CHECK(max_abs_diff(gle.qdot, exact.qdot) < 1e-6);
}

TEST_CASE("Ohmic bath approaches the Markov limit at large cutoff") {
    const auto [bath, params] = test::kernel_bath(1000, 1.0, 50.0, 0.1, 0.05);
    const Trajectory gle = integrate_gle(1.0, 0.0, bath, params, std::nullopt, 2e-3, 40.0);
    const DampedSineFit fit = fit_damped_sine(gle);
    CHECK(fit.decay_rate == doctest::Approx(0.05).epsilon(0.10));
    CHECK(fit.frequency == doctest::Approx(std::sqrt(1.0 - 0.0025)).epsilon(0.05));
}

TEST_CASE("analytic damped solutions") {
    const LangevinParams q{1.0, 0.5, 1.0, 0.0};
    CHECK(quantum_langevin_analytic(1.0, q) == doctest::Approx(0.46200).epsilon(1e-4));
    CHECK(quantum_langevin_analytic(1.0, q) ==
          doctest::Approx(std::exp(-0.5) * std::sin(std::sqrt(0.75))).epsilon(1e-15));
    const LangevinParams at_phase{1.3, 0.2, 2.0, 0.4};
    CHECK(quantum_langevin_analytic(0.0, at_phase) == doctest::Approx(2.0 * std::sin(0.4)));
    CHECK(bohmian_langevin_analytic(0.0, at_phase) == doctest::Approx(2.0 * std::sin(0.4)));
    CHECK(LangevinParams{2.25, 0.5, 1.0, 0.0}.damped_frequency() == doctest::Approx(1.94856).epsilon(1e-5));

    // zero friction is a pure sinusoid
    const LangevinParams free{1.0, 0.0, 1.0, 0.0};
    CHECK(quantum_langevin_analytic(7.0, free) == doctest::Approx(std::sin(7.0)).epsilon(1e-15));

    CHECK_THROWS_AS(quantum_langevin_analytic(1.0, LangevinParams{1.0, 1.0, 1.0, 0.0}), OverdampedUnsupported);
    CHECK_THROWS_AS(bohmian_langevin_analytic(1.0, LangevinParams{1.0, 1.5, 1.0, 0.0}), OverdampedUnsupported);
    CHECK_THROWS_AS(merged_solution(1.0, 10.0, 1.0, 1.0), OverdampedUnsupported);
}

TEST_CASE("analytic solutions satisfy their equations of motion") {
    for (const LangevinParams& p : {LangevinParams{1.0, 0.5, 1.0, 0.3}, LangevinParams{2.25, 0.5, 0.7, 1.1}}) {
        auto f = [&](double t) { return bohmian_langevin_analytic(t, p); };
        for (double t : {0.5, 1.0, 2.5, 4.0}) {
            const double res = d2(f, t, 1e-3) + 2.0 * p.omega * p.lambda * d1(f, t, 1e-3) + p.omega * p.omega * f(t);
            CHECK(std::abs(res) < 1e-8);
        }
    }
    const LangevinParams p{2.25, 0.5, 0.7, 1.1};
    const Trajectory rk = integrate_damped_oscillator(2.25, 0.5, p.amplitude * std::sin(p.phase),
                                                      d1([&](double t) { return bohmian_langevin_analytic(t, p); },
                                                         0.0, 1e-3),
                                                      1e-3, 10.0, Method::bohmian);
    const Trajectory exact = sample_analytic(p, 1e-3, 10.0, Method::bohmian);
    CHECK(max_abs_diff(rk.q, exact.q) < 1e-6);
}

TEST_CASE("initial-condition matching") {
    for (auto [q0, v0] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}, std::pair{-0.4, 2.5}}) {
        const LangevinParams p = LangevinParams::from_initial(1.7, 0.3, q0, v0);
        const Trajectory t = sample_analytic(p, 1e-3, 1.0, Method::quantum);
        CHECK(t.q[0] == doctest::Approx(q0).epsilon(1e-14));
        CHECK(t.qdot[0] == doctest::Approx(v0).epsilon(1e-14));
    }
}

TEST_CASE("merged solution") {
    const double w0 = 10.0, lambda = 0.5, v0 = 2.0;
    CHECK(merged_solution(0.0, w0, lambda, v0) == 0.0);
    const double h = 1e-6;
    const double slope = (merged_solution(h, w0, lambda, v0) - merged_solution(-h, w0, lambda, v0)) / (2 * h);
    CHECK(std::abs(slope - v0) / v0 < 1e-6);
    const LangevinParams p{w0, lambda, v0 / (std::sqrt(1 - lambda * lambda) * w0), 0.0};
    for (int k = 0; k <= 200; ++k) {
        const double t = 0.01 * k;
        CHECK(std::abs(merged_solution(t, w0, lambda, v0) - quantum_langevin_analytic(t, p)) <= 1e-15);
    }
}

TEST_CASE("per-mode energy split") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> z(0.0, 1.0);
    const auto [bath, params] = test::cubic_bath(10, 1.0, 1.5, 0.5);
    const GroundState gs = build_ground_state(params, bath);
    for (int i = 0; i < 50; ++i) {
        PhasePoint pt = PhasePoint::zeros(10);
        pt.q = z(rng);
        pt.p = z(rng);
        for (int a = 0; a < 10; ++a) {
            pt.x[a] = z(rng);
            pt.p_bath[a] = z(rng);
        }
        for (std::size_t a = 0; a < 10; ++a) {
            const double direct = mode_energy_direct(pt, gs.omega_sq(), bath, a);
            CHECK(test::rel_err(mode_energy_normal(pt, gs, a), direct) < 1e-12);
        }
    }
    CHECK(total_energy(PhasePoint::zeros(10), params, bath) == 0.0);
}

TEST_CASE("step guard and argument checks") {
    const auto [bath, params] = test::cubic_bath(8, 1.0, 1.5, 0.5);
    PhasePoint s = PhasePoint::zeros(8);
    s.q = 1.0;
    CHECK_THROWS_AS(integrate_full_hamiltonian(s, params, bath, 0.1, 1.0), StepTooLarge);
    CHECK_THROWS_AS(integrate_gle(1.0, 0.0, bath, params, std::nullopt, 0.1, 1.0), StepTooLarge);
    CHECK_THROWS_AS(integrate_full_hamiltonian(PhasePoint::zeros(3), params, bath, 1e-3, 1.0), InvalidSpec);
    CHECK_THROWS_AS(step_count(0.0, 1.0), InvalidSpec);
    CHECK(step_count(1e-3, 20.0) == 20000);
    CHECK(parse_method("markov_quantum") == Method::markov_quantum);
    CHECK_THROWS_AS(parse_method("euler"), InvalidSpec);
}
