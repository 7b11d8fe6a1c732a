#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qbath/bath.hpp"
#include "qbath/modes.hpp"

namespace qbath {

// Coefficients of the Bohmian Langevin equation
//   q'' + 2 xi lambda_B q' + xi^2 q = eta(x),   eta(x) = sum_alpha eta_weights[alpha] x_alpha.
// eta_weights already include the A*B(x)/2 contribution.
struct BohmianCoefficients {
    double xi_sq{0.0};
    std::vector<double> eta_weights;

    double xi() const;
    double eta(std::span<const double> x) const;
};

// V = omega^2 q^2 / 2 + sum [omega_a^2 x_a^2 / 2 - gamma_a omega_a^2 q x_a].
double classical_potential(const PhasePoint& point, double omega_sq, const BathRealization& bath);

// Quantum potential of the ground state in its expanded (A, B) form.
double quantum_potential(const PhasePoint& point, const GroundState& gs);

// xi^2 and eta weights without the sign check. For N = 1 xi^2 is identically
// zero (M^2 equals the potential matrix), which the force identity still needs.
BohmianCoefficients bohmian_linear_form(const GroundState& gs, const BathRealization& bath);

// Throws NegativeXiSq when xi^2 <= 0.
BohmianCoefficients bohmian_coefficients(const GroundState& gs, const BathRealization& bath);

// -d(Q + V)/dq from the gradient of the quadratic forms.
double bohmian_force(const PhasePoint& point, const GroundState& gs, const BathRealization& bath);

struct MeanEstimate {
    double mean{0.0};
    double std_error{0.0};
    std::size_t count{0};
};

// Monte Carlo estimate of <eta> over ground-state samples; exact value is 0.
MeanEstimate mean_eta(const GroundState& gs, const BathRealization& bath,
                      std::size_t sample_count, std::uint64_t seed);

// Sample mean and standard error of a sequence.
MeanEstimate estimate_mean(std::span<const double> values);

}  // namespace qbath
