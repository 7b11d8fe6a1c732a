#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qbath/bath.hpp"
#include "qbath/modes.hpp"

namespace qbath {

enum class Method { full, gle, markov_quantum, bohmian, merged, quantum };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);

// Uniformly sampled q(t) and its velocity, t_k = t0 + k dt.
struct Trajectory {
    double dt{0.0};
    double t0{0.0};
    std::vector<double> q;
    std::vector<double> qdot;
    Method label{Method::full};

    std::size_t size() const noexcept { return q.size(); }
    double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
};

// Parameters of C e^{-omega lambda t} sin(sqrt(1 - lambda^2) omega t + phase).
struct LangevinParams {
    double omega{1.0};
    double lambda{0.5};
    double amplitude{1.0};
    double phase{0.0};

    double damped_frequency() const;
    double decay_rate() const noexcept { return omega * lambda; }

    // Amplitude and phase matching q(0) = q0, q'(0) = qdot0.
    static LangevinParams from_initial(double omega, double lambda, double q0, double qdot0);
};

// Number of steps for [0, t_end] at step dt (t_end rounded to a whole step).
std::size_t step_count(double dt, double t_end);

// Symplectic fourth-order (composed velocity Verlet) integration of the bilinear
// Hamiltonian; qdot records the system momentum.
Trajectory integrate_full_hamiltonian(const PhasePoint& initial, const SystemParams& params,
                                      const BathRealization& bath, double dt, double t_end);

// Same integrator, returning only the final phase point.
PhasePoint evolve_full_hamiltonian(const PhasePoint& initial, const SystemParams& params,
                                   const BathRealization& bath, double dt, std::size_t steps);

// Classical (Wigner-sampled) analog of the bath noise force R(t).
double classical_noise(std::span<const double> x0, std::span<const double> p0, double q0,
                       const BathRealization& bath, double t, double t0 = 0.0);

enum class KernelModel {
    discrete,  // T(t) of the bath realization
    markov,    // T -> lambda' delta(t), i.e. instantaneous friction lambda' qdot
};

struct GleOptions {
    KernelModel kernel{KernelModel::discrete};
    // Friction lambda' for the Markov model; 0 means 2 omega0 lambda_q.
    double markov_strength{0.0};
    // Truncate the convolution to the last `memory_time` of history; 0 keeps everything.
    double memory_time{0.0};
};

// q'' + omega0^2 q + int_0^t T(t - s) q'(s) ds = R(t), RK4 with trapezoidal
// history convolution. Without bath initial data R is identically zero.
Trajectory integrate_gle(double q0, double qdot0, const BathRealization& bath,
                         const SystemParams& params, const std::optional<PhasePoint>& noise,
                         double dt, double t_end, const GleOptions& options = {});

// RK4 for q'' + 2 omega lambda q' + omega^2 q = 0.
Trajectory integrate_damped_oscillator(double omega, double lambda, double q0, double qdot0,
                                       double dt, double t_end, Method label);

double quantum_langevin_analytic(double t, const LangevinParams& p);
double bohmian_langevin_analytic(double t, const LangevinParams& p);
// High-frequency merge of both solutions for q(0) = 0.
double merged_solution(double t, double omega0, double lambda, double qdot0);

// Closed-form trajectory with analytic velocity.
Trajectory sample_analytic(const LangevinParams& p, double dt, double t_end, Method label);

// H = p^2/2 + omega^2 q^2/2 + sum [p_a^2/2 + omega_a^2 x_a^2/2 - gamma_a omega_a^2 q x_a].
double total_energy(const PhasePoint& point, const SystemParams& params, const BathRealization& bath);

// Per-mode Hamiltonian in the (q/N, p/N, x_a, p_a) variables, evaluated directly
// and in the decoupled normal-mode form.
double mode_energy_direct(const PhasePoint& point, double omega_sq, const BathRealization& bath,
                          std::size_t alpha);
double mode_energy_normal(const PhasePoint& point, const GroundState& gs, std::size_t alpha);

}  // namespace qbath
