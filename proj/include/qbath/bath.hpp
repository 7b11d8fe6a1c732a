#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace qbath {

// Dimensionless parameters of the central oscillator.
struct SystemParams {
    double omega0{1.0};    // bare vibrational frequency
    double hbar{0.1};      // dimensionless quantum scale
    double lambda_q{0.5};  // quantum friction coefficient, 0 < lambda_q < 1
    double lambda_b{0.5};  // Bohmian friction coefficient, 0 < lambda_b < 1

    // Ohmic strength implied by the Markov limit: lambda'_Q = 2 omega0 lambda_Q.
    double markov_strength() const noexcept { return 2.0 * omega0 * lambda_q; }

    void validate() const;
};

enum class Discretization {
    kernel_matched,  // per-mode weight (2 lambda'/pi)(omega_c/N): discrete kernel -> continuum kernel
    paper_eq44,      // weights ~ omega^3 normalized to lambda' omega_c^4
};

std::string_view to_string(Discretization d) noexcept;
Discretization parse_discretization(std::string_view text);

struct BathSpec {
    std::size_t n_modes{100};
    double omega_c{1.5};
    double lambda_q_prime{1.0};
    Discretization discretization{Discretization::paper_eq44};
    std::uint64_t seed{1};
    // Reject realizations with any gamma_alpha >= 1. Low-frequency modes of a
    // kernel-matched grid have gamma ~ sqrt(N), so dynamics checks turn this off.
    bool enforce_weak_coupling{true};

    void validate() const;
};

// Concrete bath: mode frequencies and couplings, sorted by frequency.
struct BathRealization {
    std::vector<double> omega;
    std::vector<double> gamma;
    std::vector<double> gamma_bar;  // gamma * omega^{3/2}

    std::size_t size() const noexcept { return omega.size(); }
    double weight(std::size_t alpha) const noexcept {
        return gamma[alpha] * gamma[alpha] * omega[alpha] * omega[alpha];
    }
    // Sum of gamma^2 omega^2, which is also T(0).
    double total_weight() const noexcept;
    double max_frequency() const noexcept;

    // Builds a realization from explicit arrays (gamma_bar derived).
    static BathRealization from_modes(std::vector<double> omega, std::vector<double> gamma);
};

BathRealization discretize_ohmic(const BathSpec& spec);

// J(omega) = lambda' omega on [0, omega_c].
double spectral_density(double omega_e, double lambda_q_prime, double omega_c);

// T(t) = sum_alpha gamma_bar^2 / omega cos(omega t).
double memory_kernel_discrete(const BathRealization& bath, double t);

// (2/pi) int_0^omega_c J(w)/w cos(w t) dw in closed form.
double memory_kernel_continuum(double lambda_q_prime, double omega_c, double t);

// omega^2 = omega0^2 + sum gamma^2 omega_alpha^2.
double effective_frequency_squared(const SystemParams& params, const BathRealization& bath);

}  // namespace qbath
