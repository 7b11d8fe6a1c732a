#include "qbath/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "qbath/errors.hpp"

namespace qbath {

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::full: return "full";
        case Method::gle: return "gle";
        case Method::markov_quantum: return "markov_quantum";
        case Method::bohmian: return "bohmian";
        case Method::merged: return "merged";
        case Method::quantum: return "quantum";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    for (Method m : {Method::full, Method::gle, Method::markov_quantum, Method::bohmian,
                     Method::merged, Method::quantum}) {
        if (to_string(m) == text) return m;
    }
    throw InvalidSpec("unknown method '" + std::string(text) + "'");
}

namespace {

void check_underdamped(double lambda) {
    if (lambda >= 1.0) {
        throw OverdampedUnsupported("friction " + std::to_string(lambda) +
                                    " >= 1 is not underdamped");
    }
    if (lambda < 0.0) throw InvalidSpec("friction must be non-negative");
}

void check_step(double dt, double t_end, double fastest) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidSpec("dt and t_end must be positive");
    if (dt * fastest > 0.1) {
        std::ostringstream msg;
        msg << "dt = " << dt << " too large for frequency " << fastest << " (dt * omega must be <= 0.1)";
        throw StepTooLarge(msg.str());
    }
}

void check_sizes(const PhasePoint& point, const BathRealization& bath) {
    if (point.x.size() != bath.size() || point.p_bath.size() != bath.size()) {
        throw InvalidSpec("phase point and bath have different mode counts");
    }
}

// Accelerations of the bilinear Hamiltonian.
void accelerations(const PhasePoint& s, double omega_sq, const BathRealization& bath,
                   double& acc_q, std::vector<double>& acc_x) {
    acc_q = -omega_sq * s.q;
    for (std::size_t al = 0; al < bath.size(); ++al) {
        const double wa2 = bath.omega[al] * bath.omega[al];
        acc_q += bath.gamma[al] * wa2 * s.x[al];
        acc_x[al] = -wa2 * s.x[al] + bath.gamma[al] * wa2 * s.q;
    }
}

// One step is Yoshida's fourth-order triple jump of velocity Verlet substeps.
// Plain Verlet at dt = 1e-3 leaves a phase error of a few 1e-7 over t = 10.
template <class Observer>
PhasePoint verlet(const PhasePoint& initial, const SystemParams& params, const BathRealization& bath,
                  double dt, std::size_t steps, Observer&& observe) {
    check_sizes(initial, bath);
    const double omega_sq = effective_frequency_squared(params, bath);
    const std::size_t n = bath.size();
    const double cbrt2 = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cbrt2);
    const double sub[3] = {w1 * dt, -cbrt2 * w1 * dt, w1 * dt};

    PhasePoint s = initial;
    double acc_q = 0.0;
    std::vector<double> acc_x(n);
    accelerations(s, omega_sq, bath, acc_q, acc_x);
    observe(s);
    for (std::size_t k = 0; k < steps; ++k) {
        for (double h : sub) {
            s.p += 0.5 * h * acc_q;
            for (std::size_t al = 0; al < n; ++al) s.p_bath[al] += 0.5 * h * acc_x[al];
            s.q += h * s.p;
            for (std::size_t al = 0; al < n; ++al) s.x[al] += h * s.p_bath[al];
            accelerations(s, omega_sq, bath, acc_q, acc_x);
            s.p += 0.5 * h * acc_q;
            for (std::size_t al = 0; al < n; ++al) s.p_bath[al] += 0.5 * h * acc_x[al];
        }
        observe(s);
    }
    return s;
}

}  // namespace

double LangevinParams::damped_frequency() const {
    return std::sqrt(1.0 - lambda * lambda) * omega;
}

LangevinParams LangevinParams::from_initial(double omega, double lambda, double q0, double qdot0) {
    check_underdamped(lambda);
    const double freq = std::sqrt(1.0 - lambda * lambda) * omega;
    const double s = q0;                                // C sin(phi)
    const double c = (qdot0 + omega * lambda * q0) / freq;  // C cos(phi)
    return LangevinParams{omega, lambda, std::hypot(s, c), std::atan2(s, c)};
}

std::size_t step_count(double dt, double t_end) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidSpec("dt and t_end must be positive");
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

Trajectory integrate_full_hamiltonian(const PhasePoint& initial, const SystemParams& params,
                                      const BathRealization& bath, double dt, double t_end) {
    const double omega = std::sqrt(effective_frequency_squared(params, bath));
    check_step(dt, t_end, std::max(omega, bath.max_frequency()));
    const std::size_t steps = step_count(dt, t_end);
    Trajectory traj;
    traj.dt = dt;
    traj.label = Method::full;
    traj.q.reserve(steps + 1);
    traj.qdot.reserve(steps + 1);
    verlet(initial, params, bath, dt, steps, [&](const PhasePoint& s) {
        traj.q.push_back(s.q);
        traj.qdot.push_back(s.p);
    });
    return traj;
}

PhasePoint evolve_full_hamiltonian(const PhasePoint& initial, const SystemParams& params,
                                   const BathRealization& bath, double dt, std::size_t steps) {
    const double omega = std::sqrt(effective_frequency_squared(params, bath));
    check_step(dt, dt * static_cast<double>(std::max<std::size_t>(steps, 1)),
               std::max(omega, bath.max_frequency()));
    return verlet(initial, params, bath, dt, steps, [](const PhasePoint&) {});
}

double classical_noise(std::span<const double> x0, std::span<const double> p0, double q0,
                       const BathRealization& bath, double t, double t0) {
    double r = 0.0;
    for (std::size_t al = 0; al < bath.size(); ++al) {
        const double w = bath.omega[al];
        const double phase = w * (t - t0);
        r += bath.gamma[al] * w * w *
             ((x0[al] - bath.gamma[al] * q0) * std::cos(phase) + p0[al] / w * std::sin(phase));
    }
    return r;
}

Trajectory integrate_gle(double q0, double qdot0, const BathRealization& bath,
                         const SystemParams& params, const std::optional<PhasePoint>& noise,
                         double dt, double t_end, const GleOptions& options) {
    const bool markov = options.kernel == KernelModel::markov;
    check_step(dt, t_end, std::max(params.omega0, markov ? 0.0 : bath.max_frequency()));
    if (noise) check_sizes(*noise, bath);

    const std::size_t steps = step_count(dt, t_end);
    const double w0sq = params.omega0 * params.omega0;
    const double friction =
        options.markov_strength > 0.0 ? options.markov_strength : params.markov_strength();

    // Noise and kernel tabulated on the half-step grid t = j dt / 2.
    const std::size_t half_points = 2 * steps + 3;
    std::vector<double> noise_half(half_points, 0.0);
    if (noise) {
        for (std::size_t j = 0; j < half_points; ++j) {
            noise_half[j] =
                classical_noise(noise->x, noise->p_bath, q0, bath, 0.5 * dt * static_cast<double>(j));
        }
    }
    std::vector<double> kernel_half;
    if (!markov) {
        kernel_half.resize(half_points);
        for (std::size_t j = 0; j < half_points; ++j) {
            kernel_half[j] = memory_kernel_discrete(bath, 0.5 * dt * static_cast<double>(j));
        }
    }
    const std::size_t memory_steps =
        options.memory_time > 0.0 ? static_cast<std::size_t>(std::ceil(options.memory_time / dt))
                                  : steps + 1;

    Trajectory traj;
    traj.dt = dt;
    traj.label = markov ? Method::markov_quantum : Method::gle;
    traj.q.resize(steps + 1);
    traj.qdot.resize(steps + 1);
    traj.q[0] = q0;
    traj.qdot[0] = qdot0;
    const std::vector<double>& v = traj.qdot;

    for (std::size_t n = 0; n < steps; ++n) {
        const double qn = traj.q[n];
        const double vn = v[n];

        // Trapezoidal convolution over [t_start, t_n] evaluated at t_n + s dt / 2, s = 0, 1, 2.
        double hist[3] = {0.0, 0.0, 0.0};
        if (!markov && n > 0) {
            const std::size_t first = n >= memory_steps ? n - memory_steps : 0;
            for (std::size_t k = first; k <= n; ++k) {
                const double wk = (k == first || k == n) ? 0.5 * v[k] : v[k];
                const double* t = &kernel_half[2 * (n - k)];
                hist[0] += wk * t[0];
                hist[1] += wk * t[1];
                hist[2] += wk * t[2];
            }
            for (double& h : hist) h *= dt;
        }
        // memory term at stage offset s (half steps) with stage velocity vs
        auto memory = [&](int s, double vs) {
            if (markov) return friction * vs;
            const double tail = 0.25 * dt * s * (kernel_half[static_cast<std::size_t>(s)] * vn +
                                                  kernel_half[0] * vs);
            return hist[s] + tail;
        };
        auto accel = [&](int s, double qs, double vs) {
            return -w0sq * qs - memory(s, vs) + noise_half[2 * n + static_cast<std::size_t>(s)];
        };

        const double a1 = accel(0, qn, vn);
        const double v2 = vn + 0.5 * dt * a1;
        const double q2 = qn + 0.5 * dt * vn;
        const double a2 = accel(1, q2, v2);
        const double v3 = vn + 0.5 * dt * a2;
        const double q3 = qn + 0.5 * dt * v2;
        const double a3 = accel(1, q3, v3);
        const double v4 = vn + dt * a3;
        const double q4 = qn + dt * v3;
        const double a4 = accel(2, q4, v4);

        traj.q[n + 1] = qn + dt / 6.0 * (vn + 2.0 * v2 + 2.0 * v3 + v4);
        traj.qdot[n + 1] = vn + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    }
    return traj;
}

Trajectory integrate_damped_oscillator(double omega, double lambda, double q0, double qdot0,
                                       double dt, double t_end, Method label) {
    if (!(omega > 0.0)) throw InvalidSpec("oscillator frequency must be positive");
    check_step(dt, t_end, omega);
    const std::size_t steps = step_count(dt, t_end);
    const double w2 = omega * omega;
    const double damping = 2.0 * omega * lambda;
    auto accel = [&](double q, double v) { return -w2 * q - damping * v; };

    Trajectory traj;
    traj.dt = dt;
    traj.label = label;
    traj.q.resize(steps + 1);
    traj.qdot.resize(steps + 1);
    traj.q[0] = q0;
    traj.qdot[0] = qdot0;
    for (std::size_t n = 0; n < steps; ++n) {
        const double q = traj.q[n];
        const double v = traj.qdot[n];
        const double a1 = accel(q, v);
        const double v2 = v + 0.5 * dt * a1;
        const double q2 = q + 0.5 * dt * v;
        const double a2 = accel(q2, v2);
        const double v3 = v + 0.5 * dt * a2;
        const double q3 = q + 0.5 * dt * v2;
        const double a3 = accel(q3, v3);
        const double v4 = v + dt * a3;
        const double q4 = q + dt * v3;
        const double a4 = accel(q4, v4);
        traj.q[n + 1] = q + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
        traj.qdot[n + 1] = v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    }
    return traj;
}

double quantum_langevin_analytic(double t, const LangevinParams& p) {
    check_underdamped(p.lambda);
    return p.amplitude * std::exp(-p.omega * p.lambda * t) *
           std::sin(std::sqrt(1.0 - p.lambda * p.lambda) * p.omega * t + p.phase);
}

double bohmian_langevin_analytic(double t, const LangevinParams& p) {
    check_underdamped(p.lambda);
    const double xi = p.omega;
    return p.amplitude * std::exp(-xi * p.lambda * t) *
           std::sin(std::sqrt(1.0 - p.lambda * p.lambda) * xi * t + p.phase);
}

double merged_solution(double t, double omega0, double lambda, double qdot0) {
    check_underdamped(lambda);
    const double freq = std::sqrt(1.0 - lambda * lambda) * omega0;
    return qdot0 / freq * std::exp(-omega0 * lambda * t) * std::sin(freq * t);
}

Trajectory sample_analytic(const LangevinParams& p, double dt, double t_end, Method label) {
    check_underdamped(p.lambda);
    const std::size_t steps = step_count(dt, t_end);
    const double rate = p.decay_rate();
    const double freq = p.damped_frequency();
    Trajectory traj;
    traj.dt = dt;
    traj.label = label;
    traj.q.resize(steps + 1);
    traj.qdot.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = dt * static_cast<double>(k);
        const double env = p.amplitude * std::exp(-rate * t);
        const double arg = freq * t + p.phase;
        traj.q[k] = label == Method::bohmian ? bohmian_langevin_analytic(t, p)
                                             : quantum_langevin_analytic(t, p);
        traj.qdot[k] = env * (freq * std::cos(arg) - rate * std::sin(arg));
    }
    return traj;
}

double total_energy(const PhasePoint& point, const SystemParams& params, const BathRealization& bath) {
    check_sizes(point, bath);
    const double omega_sq = effective_frequency_squared(params, bath);
    double h = 0.5 * point.p * point.p + 0.5 * omega_sq * point.q * point.q;
    for (std::size_t al = 0; al < bath.size(); ++al) {
        const double wa2 = bath.omega[al] * bath.omega[al];
        h += 0.5 * point.p_bath[al] * point.p_bath[al] + 0.5 * wa2 * point.x[al] * point.x[al] -
             bath.gamma[al] * wa2 * point.q * point.x[al];
    }
    return h;
}

double mode_energy_direct(const PhasePoint& point, double omega_sq, const BathRealization& bath,
                          std::size_t alpha) {
    const double nd = static_cast<double>(bath.size());
    const double qs = point.q / nd;
    const double ps = point.p / nd;
    const double wa2 = bath.omega[alpha] * bath.omega[alpha];
    const double x = point.x[alpha];
    const double px = point.p_bath[alpha];
    return 0.5 * ps * ps + 0.5 * omega_sq * qs * qs + 0.5 * px * px + 0.5 * wa2 * x * x -
           wa2 * bath.gamma[alpha] * qs * x;
}

double mode_energy_normal(const PhasePoint& point, const GroundState& gs, std::size_t alpha) {
    const ModePair& m = gs.modes()[alpha];
    const std::size_t n = gs.n_modes();
    const NormalCoords pos = to_normal_coords(point.q, point.x[alpha], m.theta, n);
    const NormalCoords mom = to_normal_coords(point.p, point.p_bath[alpha], m.theta, n);
    return 0.5 * mom.x_plus * mom.x_plus + 0.5 * m.omega_plus * m.omega_plus * pos.x_plus * pos.x_plus +
           0.5 * mom.x_minus * mom.x_minus +
           0.5 * m.omega_minus * m.omega_minus * pos.x_minus * pos.x_minus;
}

}  // namespace qbath
