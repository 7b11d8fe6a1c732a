#include "qbath/potentials.hpp"

#include <cmath>
#include <sstream>

#include "qbath/errors.hpp"

namespace qbath {

double BohmianCoefficients::xi() const { return std::sqrt(xi_sq); }

double BohmianCoefficients::eta(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t al = 0; al < eta_weights.size(); ++al) sum += eta_weights[al] * x[al];
    return sum;
}

double classical_potential(const PhasePoint& point, double omega_sq, const BathRealization& bath) {
    double v = 0.5 * omega_sq * point.q * point.q;
    for (std::size_t al = 0; al < bath.size(); ++al) {
        const double wa2 = bath.omega[al] * bath.omega[al];
        v += 0.5 * wa2 * point.x[al] * point.x[al] - bath.gamma[al] * point.q * wa2 * point.x[al];
    }
    return v;
}

double quantum_potential(const PhasePoint& point, const GroundState& gs) {
    const double hbar = gs.hbar();
    const double nd = static_cast<double>(gs.n_modes());
    const double q = point.q;
    const double A = gs.A();
    const double B = gs.B(point.x);

    double braces = 2.0 * A - (4.0 * A * A * q * q + 4.0 * A * B * q + B * B) / (2.0 * hbar);
    for (std::size_t al = 0; al < gs.n_modes(); ++al) {
        const ModePair& m = gs.modes()[al];
        const double a2 = m.a * m.a;
        const double b2 = m.b * m.b;
        const double x = point.x[al];
        const double inner = 2.0 * m.a * m.b * q * m.delta / nd + 2.0 * a2 * m.omega_plus * x +
                             2.0 * b2 * m.omega_minus * x;
        braces += (2.0 * a2 * m.omega_plus + 2.0 * b2 * m.omega_minus) - inner * inner / (2.0 * hbar);
    }
    return 0.25 * hbar * braces;
}

BohmianCoefficients bohmian_linear_form(const GroundState& gs, const BathRealization& bath) {
    const double nd = static_cast<double>(gs.n_modes());
    const double A = gs.A();

    double spread = 0.0;
    for (const ModePair& m : gs.modes()) spread += m.a * m.a * m.b * m.b * m.delta * m.delta / (nd * nd);

    BohmianCoefficients c;
    c.xi_sq = -A * A + gs.omega_sq() - spread;
    c.eta_weights.resize(gs.n_modes());
    for (std::size_t al = 0; al < gs.n_modes(); ++al) {
        const ModePair& m = gs.modes()[al];
        const double ab_delta = m.a * m.b * m.delta / nd;
        const double wa2 = bath.omega[al] * bath.omega[al];
        c.eta_weights[al] = A * ab_delta + bath.gamma[al] * wa2 +
                            ab_delta * (m.a * m.a * m.omega_plus + m.b * m.b * m.omega_minus);
    }
    return c;
}

BohmianCoefficients bohmian_coefficients(const GroundState& gs, const BathRealization& bath) {
    BohmianCoefficients c = bohmian_linear_form(gs, bath);
    if (!(c.xi_sq > 0.0)) {
        std::ostringstream msg;
        msg << "xi^2 = " << c.xi_sq << " is not positive; the bath is outside the oscillatory regime";
        throw NegativeXiSq(msg.str());
    }
    return c;
}

double bohmian_force(const PhasePoint& point, const GroundState& gs, const BathRealization& bath) {
    // Q = (hbar/2) tr M - |M v|^2 / 2, so -dQ/dq = sum_i (Mv)_i M_iq.
    const std::vector<double> mv = gs.apply_precision(point.q, point.x);
    double quantum = mv[0] * gs.A();
    for (std::size_t al = 0; al < gs.n_modes(); ++al) quantum += mv[al + 1] * gs.coupling_entry(al);

    double classical = -gs.omega_sq() * point.q;
    for (std::size_t al = 0; al < bath.size(); ++al) {
        classical += bath.gamma[al] * bath.omega[al] * bath.omega[al] * point.x[al];
    }
    return quantum + classical;
}

MeanEstimate estimate_mean(std::span<const double> values) {
    MeanEstimate est;
    est.count = values.size();
    if (values.empty()) return est;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    est.mean = mean;
    if (values.size() > 1) {
        const double n = static_cast<double>(values.size());
        est.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return est;
}

MeanEstimate mean_eta(const GroundState& gs, const BathRealization& bath,
                      std::size_t sample_count, std::uint64_t seed) {
    if (sample_count < 100) throw InvalidSpec("mean_eta needs at least 100 samples");
    const BohmianCoefficients coeffs = bohmian_coefficients(gs, bath);
    const std::vector<PhasePoint> samples = sample_ground_state(gs, seed, sample_count);
    std::vector<double> eta(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) eta[i] = coeffs.eta(samples[i].x);
    return estimate_mean(eta);
}

}  // namespace qbath
