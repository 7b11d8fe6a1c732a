#include "qbath/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qbath/errors.hpp"

namespace qbath {

void SystemParams::validate() const {
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
        throw InvalidSpec("omega0 must be positive and finite");
    }
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
        throw InvalidSpec("hbar must be positive and finite");
    }
    if (!(lambda_q > 0.0 && lambda_q < 1.0)) {
        throw InvalidSpec("lambda_q must lie in (0, 1)");
    }
    if (!(lambda_b > 0.0 && lambda_b < 1.0)) {
        throw InvalidSpec("lambda_b must lie in (0, 1)");
    }
}

std::string_view to_string(Discretization d) noexcept {
    switch (d) {
        case Discretization::kernel_matched: return "kernel_matched";
        case Discretization::paper_eq44: return "paper_eq44";
    }
    return "unknown";
}

Discretization parse_discretization(std::string_view text) {
    if (text == "kernel_matched") return Discretization::kernel_matched;
    if (text == "paper_eq44") return Discretization::paper_eq44;
    throw InvalidSpec("unknown discretization '" + std::string(text) +
                      "' (expected kernel_matched or paper_eq44)");
}

void BathSpec::validate() const {
    if (n_modes < 1) throw InvalidSpec("n_modes must be at least 1");
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
        throw InvalidSpec("omega_c must be positive and finite");
    }
    if (!(lambda_q_prime > 0.0) || !std::isfinite(lambda_q_prime)) {
        throw InvalidSpec("lambda_q_prime must be positive and finite");
    }
}

double BathRealization::total_weight() const noexcept {
    double sum = 0.0;
    for (std::size_t a = 0; a < size(); ++a) sum += weight(a);
    return sum;
}

double BathRealization::max_frequency() const noexcept {
    return omega.empty() ? 0.0 : *std::max_element(omega.begin(), omega.end());
}

BathRealization BathRealization::from_modes(std::vector<double> omega, std::vector<double> gamma) {
    if (omega.size() != gamma.size()) {
        throw InvalidSpec("omega and gamma arrays differ in length");
    }
    BathRealization bath;
    bath.gamma_bar.resize(omega.size());
    for (std::size_t a = 0; a < omega.size(); ++a) {
        if (!(omega[a] > 0.0)) throw InvalidSpec("mode frequencies must be positive");
        bath.gamma_bar[a] = gamma[a] * std::pow(omega[a], 1.5);
    }
    bath.omega = std::move(omega);
    bath.gamma = std::move(gamma);
    return bath;
}

BathRealization discretize_ohmic(const BathSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_modes;
    const double step = spec.omega_c / static_cast<double>(n);

    std::vector<double> omega(n);
    for (std::size_t a = 0; a < n; ++a) {
        omega[a] = (static_cast<double>(a) + 0.5) * step;
    }

    std::vector<double> weight(n);
    switch (spec.discretization) {
        case Discretization::kernel_matched: {
            const double w = 2.0 * spec.lambda_q_prime / std::numbers::pi * step;
            std::fill(weight.begin(), weight.end(), w);
            break;
        }
        case Discretization::paper_eq44: {
            double cubes = 0.0;
            for (double w : omega) cubes += w * w * w;
            const double target = spec.lambda_q_prime * std::pow(spec.omega_c, 4);
            for (std::size_t a = 0; a < n; ++a) {
                weight[a] = target * omega[a] * omega[a] * omega[a] / cubes;
            }
            break;
        }
    }

    std::vector<double> gamma(n);
    for (std::size_t a = 0; a < n; ++a) {
        gamma[a] = std::sqrt(weight[a]) / omega[a];
        if (spec.enforce_weak_coupling && !(gamma[a] < 1.0)) {
            throw OverCoupling("mode " + std::to_string(a + 1) + " needs gamma = " +
                               std::to_string(gamma[a]) +
                               " >= 1; use more modes or a weaker coupling");
        }
    }
    return BathRealization::from_modes(std::move(omega), std::move(gamma));
}

double spectral_density(double omega_e, double lambda_q_prime, double omega_c) {
    if (!(omega_e >= 0.0 && omega_e <= omega_c)) {
        throw DomainError("spectral density is defined on [0, omega_c]");
    }
    return lambda_q_prime * omega_e;
}

double memory_kernel_discrete(const BathRealization& bath, double t) {
    double sum = 0.0;
    for (std::size_t a = 0; a < bath.size(); ++a) {
        sum += bath.weight(a) * std::cos(bath.omega[a] * t);
    }
    return sum;
}

double memory_kernel_continuum(double lambda_q_prime, double omega_c, double t) {
    const double scale = 2.0 * lambda_q_prime / std::numbers::pi;
    const double x = omega_c * t;
    // sin(x)/x loses digits near 0; switch to the series there.
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return scale * omega_c * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
    }
    return scale * std::sin(x) / t;
}

double effective_frequency_squared(const SystemParams& params, const BathRealization& bath) {
    return params.omega0 * params.omega0 + bath.total_weight();
}

}  // namespace qbath
