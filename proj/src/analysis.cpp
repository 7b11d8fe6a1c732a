#include "qbath/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qbath/errors.hpp"

namespace qbath {

double DampedSineFit::operator()(double t) const {
    return amplitude * std::exp(-decay_rate * t) * std::sin(frequency * t + phase);
}

namespace {

// Linear form e^{-g t} (c1 sin(w t) + c2 cos(w t)).
struct LinearForm {
    double c1, c2, decay, freq;
};

double sum_sq_residual(const LinearForm& p, std::span<const double> t, std::span<const double> y) {
    double ss = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = std::exp(-p.decay * t[k]);
        const double r = y[k] - e * (p.c1 * std::sin(p.freq * t[k]) + p.c2 * std::cos(p.freq * t[k]));
        ss += r * r;
    }
    return ss;
}

// Best (c1, c2) for fixed decay and frequency.
LinearForm solve_linear(double decay, double freq, std::span<const double> t, std::span<const double> y) {
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(t.size()), 2);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(t.size()));
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double e = std::exp(-decay * t[k]);
        basis(i, 0) = e * std::sin(freq * t[k]);
        basis(i, 1) = e * std::cos(freq * t[k]);
        rhs(i) = y[k];
    }
    const Eigen::Vector2d c = basis.colPivHouseholderQr().solve(rhs);
    return {c(0), c(1), decay, freq};
}

// Noise level from the median absolute second difference; for a smooth signal
// sampled finely the second difference is tiny, so what remains is the noise.
double noise_level(std::span<const double> y) {
    std::vector<double> d2;
    d2.reserve(y.size());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) d2.push_back(std::abs(y[k + 1] - 2.0 * y[k] + y[k - 1]));
    if (d2.empty()) return 0.0;
    auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
    std::nth_element(d2.begin(), mid, d2.end());
    return *mid / (0.6745 * std::sqrt(6.0));
}

// Sign changes with hysteresis: the signal must pass +-threshold on both sides,
// so noise riding on a decayed tail does not register. The crossing time is the
// last sign change before the opposite threshold is reached.
std::vector<double> zero_crossings(std::span<const double> t, std::span<const double> y, double threshold) {
    std::vector<double> out;
    int state = 0;  // sign of the last excursion beyond the threshold
    double pending = 0.0;
    bool has_pending = false;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (k > 0 && state != 0) {
            if (y[k - 1] == 0.0 || y[k - 1] * y[k] < 0.0) {
                const double frac = y[k - 1] / (y[k - 1] - y[k]);
                pending = t[k - 1] + frac * (t[k] - t[k - 1]);
                has_pending = true;
            }
        }
        const int s = y[k] > threshold ? 1 : (y[k] < -threshold ? -1 : 0);
        if (s != 0 && s != state) {
            if (state != 0 && has_pending) out.push_back(pending);
            state = s;
            has_pending = false;
        }
    }
    return out;
}

}  // namespace

DampedSineFit fit_damped_sine(const Trajectory& traj, const FitOptions& options) {
    const std::size_t n = traj.size();
    if (n < 4) throw DegenerateSignal("trajectory too short to fit");
    const std::span<const double> y(traj.q);
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = traj.dt * static_cast<double>(k);

    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double peak = std::max(std::abs(*lo), std::abs(*hi));
    if (!(peak > 0.0) || *hi - *lo <= 1e-14 * peak) {
        throw DegenerateSignal("signal is constant or zero");
    }

    const double threshold = std::max(5.0 * noise_level(y), 1e-12 * peak);
    const std::vector<double> crossings = zero_crossings(t, y, threshold);
    if (crossings.size() < 2) {
        throw DegenerateSignal("need at least two zero crossings to seed the frequency");
    }
    const double half_period =
        (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
    const double freq0 = std::numbers::pi / half_period;

    // Peak |q| in each complete lobe between consecutive crossings.
    std::vector<double> lobes;
    for (std::size_t j = 0; j + 1 < crossings.size(); ++j) {
        double m = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (t[k] > crossings[j] && t[k] < crossings[j + 1]) m = std::max(m, std::abs(y[k]));
        }
        if (m > 0.0) lobes.push_back(m);
    }
    double decay0 = 0.0;
    if (lobes.size() >= 2) {
        decay0 = std::log(lobes.front() / lobes.back()) /
                 (static_cast<double>(lobes.size() - 1) * half_period);
    }

    LinearForm p = solve_linear(decay0, freq0, t, y);
    double sse = sum_sq_residual(p, t, y);

    DampedSineFit fit;
    const auto rows = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd jac(rows, 4);
    Eigen::VectorXd res(rows);
    for (std::size_t it = 0; it < options.max_iterations; ++it) {
        fit.iterations = it + 1;
        for (std::size_t k = 0; k < n; ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            const double e = std::exp(-p.decay * t[k]);
            const double s = std::sin(p.freq * t[k]);
            const double c = std::cos(p.freq * t[k]);
            const double model = e * (p.c1 * s + p.c2 * c);
            jac(i, 0) = e * s;
            jac(i, 1) = e * c;
            jac(i, 2) = -t[k] * model;
            jac(i, 3) = e * t[k] * (p.c1 * c - p.c2 * s);
            res(i) = y[k] - model;
        }
        const Eigen::Vector4d step = jac.colPivHouseholderQr().solve(res);
        const Eigen::Vector4d current(p.c1, p.c2, p.decay, p.freq);
        const double rel = step.norm() / std::max(current.norm(), std::numeric_limits<double>::min());

        // Halve the step until the residual does not grow.
        double scale = 1.0;
        LinearForm trial{};
        double trial_sse = std::numeric_limits<double>::infinity();
        for (int h = 0; h < 40; ++h) {
            trial = {p.c1 + scale * step(0), p.c2 + scale * step(1), p.decay + scale * step(2),
                     p.freq + scale * step(3)};
            trial_sse = sum_sq_residual(trial, t, y);
            if (trial_sse <= sse) break;
            scale *= 0.5;
        }
        if (trial_sse <= sse) {
            p = trial;
            sse = trial_sse;
        }
        if (rel * scale < options.tolerance || trial_sse > sse) {
            // No further descent possible: converged when the last update was already small.
            fit.converged = rel * scale < options.tolerance || rel < 1e-6;
            break;
        }
    }

    if (p.freq < 0.0) {
        p.freq = -p.freq;
        p.c1 = -p.c1;
    }
    fit.amplitude = std::hypot(p.c1, p.c2);
    fit.phase = std::atan2(p.c2, p.c1);
    fit.decay_rate = p.decay;
    fit.frequency = p.freq;
    fit.residual_rms = std::sqrt(sse / static_cast<double>(n));
    if (!fit.converged && options.require_convergence) {
        throw NoConvergence("damped-sine fit did not converge in " +
                            std::to_string(fit.iterations) + " iterations");
    }
    return fit;
}

ComparisonMetrics compare_trajectories(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size() || a.t0 != b.t0 ||
        std::abs(a.dt - b.dt) > 1e-12 * std::max(std::abs(a.dt), std::abs(b.dt))) {
        throw GridMismatch("trajectories are sampled on different time grids");
    }
    ComparisonMetrics m;
    double diff_sq = 0.0;
    double ref_sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a.q[k] - b.q[k];
        diff_sq += d * d;
        ref_sq += a.q[k] * a.q[k];
        m.max_abs_diff = std::max(m.max_abs_diff, std::abs(d));
    }
    if (ref_sq > 0.0) {
        m.relative_l2 = std::sqrt(diff_sq / ref_sq);
    } else {
        m.relative_l2 = diff_sq > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }

    try {
        const DampedSineFit fa = fit_damped_sine(a);
        const DampedSineFit fb = fit_damped_sine(b);
        m.frequency_ratio = fb.frequency / fa.frequency;
        m.decay_ratio = fb.decay_rate / fa.decay_rate;
    } catch (const NumericError&) {
        m.frequency_ratio = std::numeric_limits<double>::quiet_NaN();
        m.decay_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::regime1: return "regime1";
        case Regime::regime2: return "regime2";
        case Regime::intermediate: return "intermediate";
    }
    return "unknown";
}

RegimeClass classify_regime(double omega0, double omega_c) {
    if (!(omega0 > 0.0) || !(omega_c > 0.0)) throw InvalidSpec("frequencies must be positive");
    RegimeClass rc;
    rc.ratio = omega_c * omega_c / omega0;
    if (rc.ratio > kRegime1Threshold) {
        rc.regime = Regime::regime1;
    } else if (rc.ratio <= kRegime2Threshold) {
        rc.regime = Regime::regime2;
    } else {
        rc.regime = Regime::intermediate;
    }
    return rc;
}

}  // namespace qbath
