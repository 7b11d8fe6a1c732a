#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "qbath/bath.hpp"

namespace qbath {

// Rotation that decouples the (q/N, x_alpha) pair of one bath mode, and the
// resulting normal-mode frequencies.
struct ModePair {
    double theta{0.0};
    double a{0.0};  // sin(theta)
    double b{1.0};  // cos(theta)
    double omega_plus{0.0};
    double omega_minus{0.0};
    double delta{0.0};  // omega_plus - omega_minus
};

// Instantaneous coordinates of the system and all bath modes.
struct PhasePoint {
    double q{0.0};
    double p{0.0};
    std::vector<double> x;
    std::vector<double> p_bath;

    static PhasePoint zeros(std::size_t n_modes) {
        return PhasePoint{0.0, 0.0, std::vector<double>(n_modes, 0.0),
                          std::vector<double>(n_modes, 0.0)};
    }
    std::size_t size() const noexcept { return x.size(); }
};

// theta = 1/2 atan2(-2 gamma omega_alpha^2, omega^2 - omega_alpha^2).
double rotation_angle(double omega_sq, double omega_alpha, double gamma_alpha);

ModePair mode_frequencies(double theta, double omega_sq, double omega_alpha, double gamma_alpha);

// Off-diagonal coefficient of the rotated 2x2 potential; zero when theta is
// the decoupling angle.
double rotated_cross_term(double theta, double omega_sq, double omega_alpha, double gamma_alpha);

struct NormalCoords {
    double x_plus;
    double x_minus;
};

NormalCoords to_normal_coords(double q, double x_alpha, double theta, std::size_t n_modes);
// Returns (q, x_alpha).
std::pair<double, double> from_normal_coords(NormalCoords c, double theta, std::size_t n_modes);

// Gaussian ground state |psi0|^2 ~ exp(-(1/hbar) v^T M v) over v = (q, x_1..x_N).
//
// M has arrowhead structure:
//   M_qq         = sum_alpha (b^2 w+ + a^2 w-) / N^2   (= A)
//   M_q,x_alpha  = a b Delta_alpha / N
//   M_x_alpha    = a^2 w+ + b^2 w-
// Positions are sampled with covariance (hbar/2) M^{-1}; the Wigner function
// of a real Gaussian factorizes, so momenta have covariance (hbar/2) M.
class GroundState {
public:
    GroundState(std::vector<ModePair> modes, double hbar, double omega_sq);

    std::size_t n_modes() const noexcept { return modes_.size(); }
    double hbar() const noexcept { return hbar_; }
    double omega_sq() const noexcept { return omega_sq_; }
    const std::vector<ModePair>& modes() const noexcept { return modes_; }
    const Eigen::MatrixXd& precision_core() const noexcept { return m_; }
    const Eigen::MatrixXd& cholesky_factor() const noexcept { return chol_; }

    // A of the quantum potential, equal to M_qq.
    double A() const noexcept { return m_(0, 0); }
    // B(x) = sum_alpha weight_alpha x_alpha.
    std::span<const double> factor_B_weights() const noexcept { return b_weights_; }
    double B(std::span<const double> x) const;

    // Diagonal entry M_{x_alpha x_alpha}.
    double bath_diagonal(std::size_t alpha) const noexcept { return m_(alpha + 1, alpha + 1); }
    // Off-diagonal entry M_{q x_alpha}.
    double coupling_entry(std::size_t alpha) const noexcept { return m_(0, alpha + 1); }

    // v^T M v using the arrowhead structure.
    double quadratic_form(double q, std::span<const double> x) const;
    // (M v) using the arrowhead structure; first entry is the q component.
    std::vector<double> apply_precision(double q, std::span<const double> x) const;

    // psi0 evaluated as the literal product over modes of normalized factors.
    double wavefunction(double q, std::span<const double> x) const;
    // log psi0, same product form (sum of per-mode log factors).
    double log_wavefunction(double q, std::span<const double> x) const;

    // Exact covariance of positions, (hbar/2) M^{-1}.
    Eigen::MatrixXd position_covariance() const;

private:
    std::vector<ModePair> modes_;
    double hbar_;
    double omega_sq_;
    Eigen::MatrixXd m_;
    Eigen::MatrixXd chol_;  // lower factor L with L L^T = M
    std::vector<double> b_weights_;
};

GroundState build_ground_state(const SystemParams& params, const BathRealization& bath);

// Draws count phase points from the ground-state Wigner distribution.
// The stream is split into fixed-size chunks with seeds derived from (seed,
// chunk index), so the result does not depend on `threads`.
std::vector<PhasePoint> sample_ground_state(const GroundState& gs, std::uint64_t seed,
                                            std::size_t count, unsigned threads = 1);

inline constexpr std::size_t kSampleChunk = 4096;

}  // namespace qbath
