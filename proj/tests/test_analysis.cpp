#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qbath/analysis.hpp"
#include "qbath/errors.hpp"

using namespace qbath;

namespace {

Trajectory synth(double omega, double lambda, double amp, double phase, double dt, double t_end) {
    return sample_analytic(LangevinParams{omega, lambda, amp, phase}, dt, t_end, Method::quantum);
}

}  // namespace

TEST_CASE("fit recovers an exact damped sine") {
    const Trajectory t = synth(1.0, 0.5, 1.0, 0.0, 1e-3, 20.0);
    const DampedSineFit fit = fit_damped_sine(t);
    CHECK(fit.converged);
    CHECK(fit.decay_rate == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit.frequency == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
    CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.residual_rms < 1e-9);
    CHECK(fit(1.0) == doctest::Approx(t.q[1000]).epsilon(1e-6));
}

TEST_CASE("fit is exact across the underdamped range") {
    for (double omega : {0.5, 1.0, 2.25, 5.0}) {
        for (double lambda : {0.05, 0.3, 0.6, 0.9}) {
            const double freq = std::sqrt(1.0 - lambda * lambda) * omega;
            const double t_end = 3.0 * 2.0 * std::numbers::pi / freq;
            const Trajectory t = synth(omega, lambda, 0.8, 0.7, t_end / 4000.0, t_end);
            const DampedSineFit fit = fit_damped_sine(t);
            CAPTURE(omega);
            CAPTURE(lambda);
            CHECK(std::abs(fit.decay_rate / (omega * lambda) - 1.0) < 1e-6);
            CHECK(std::abs(fit.frequency / freq - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("fit tolerates small noise") {
    Trajectory t = synth(1.0, 0.5, 1.0, 0.0, 1e-3, 20.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    for (double& q : t.q) q += u(rng);
    const DampedSineFit fit = fit_damped_sine(t);
    CHECK(std::abs(fit.decay_rate - 0.5) < 1e-2);
    CHECK(std::abs(fit.frequency - std::sqrt(0.75)) < 1e-2);
    CHECK(std::abs(fit.amplitude - 1.0) < 1e-2);
}

TEST_CASE("phase and sign conventions") {
    const Trajectory t = synth(2.0, 0.2, 1.5, 2.0, 1e-3, 15.0);
    const DampedSineFit fit = fit_damped_sine(t);
    CHECK(fit.frequency > 0.0);
    for (std::size_t k : {0u, 1234u, 9999u}) CHECK(fit(t.time(k)) == doctest::Approx(t.q[k]).epsilon(1e-6));
}

TEST_CASE("degenerate signals") {
    Trajectory zero = synth(1.0, 0.5, 1.0, 0.0, 1e-3, 10.0);
    for (double& q : zero.q) q = 0.0;
    CHECK_THROWS_AS(fit_damped_sine(zero), DegenerateSignal);
    Trajectory flat = zero;
    for (double& q : flat.q) q = 2.0;
    CHECK_THROWS_AS(fit_damped_sine(flat), DegenerateSignal);
    // a quarter period has no zero crossing
    CHECK_THROWS_AS(fit_damped_sine(synth(1.0, 0.1, 1.0, 0.5, 1e-3, 1.0)), DegenerateSignal);
}

TEST_CASE("trajectory comparison") {
    const Trajectory a = synth(1.0, 0.5, 1.0, 0.0, 1e-3, 20.0);
    ComparisonMetrics same = compare_trajectories(a, a);
    CHECK(same.relative_l2 == 0.0);
    CHECK(same.max_abs_diff == 0.0);
    CHECK(same.frequency_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.decay_ratio == doctest::Approx(1.0).epsilon(1e-12));

    Trajectory neg = a;
    for (double& q : neg.q) q = -q;
    CHECK(compare_trajectories(a, neg).relative_l2 == doctest::Approx(2.0).epsilon(1e-14));

    const Trajectory b = synth(2.25, 0.5, 1.0, 0.0, 1e-3, 20.0);
    const ComparisonMetrics ab = compare_trajectories(a, b);
    const ComparisonMetrics ba = compare_trajectories(b, a);
    CHECK(ab.frequency_ratio == doctest::Approx(2.25).epsilon(1e-6));
    CHECK(ab.decay_ratio == doctest::Approx(2.25).epsilon(1e-6));
    CHECK(ab.max_abs_diff == ba.max_abs_diff);
    CHECK(ab.frequency_ratio * ba.frequency_ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ab.decay_ratio * ba.decay_ratio == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(compare_trajectories(a, synth(1.0, 0.5, 1.0, 0.0, 2e-3, 20.0)), GridMismatch);
    CHECK_THROWS_AS(compare_trajectories(a, synth(1.0, 0.5, 1.0, 0.0, 1e-3, 10.0)), GridMismatch);
}

TEST_CASE("regime classification") {
    const RegimeClass r1 = classify_regime(1.0, 1.5);
    CHECK(r1.regime == Regime::regime1);
    CHECK(r1.ratio == doctest::Approx(2.25));
    const RegimeClass r2 = classify_regime(10.0, 0.5);
    CHECK(r2.regime == Regime::regime2);
    CHECK(r2.ratio == doctest::Approx(0.025));
    const RegimeClass mid = classify_regime(1.0, 0.7);
    CHECK(mid.regime == Regime::intermediate);
    CHECK(mid.ratio == doctest::Approx(0.49));
    CHECK(to_string(Regime::regime2) == "regime2");

    // monotone in r with two switch points
    int switches = 0;
    Regime prev = classify_regime(1.0, 0.01).regime;
    for (int k = 1; k <= 2000; ++k) {
        const Regime cur = classify_regime(1.0, 0.01 * k).regime;
        if (cur != prev) ++switches;
        prev = cur;
    }
    CHECK(switches == 2);
    CHECK_THROWS_AS(classify_regime(0.0, 1.0), InvalidSpec);
}
