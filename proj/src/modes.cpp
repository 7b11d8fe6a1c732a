#include "qbath/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "qbath/errors.hpp"

namespace qbath {

double rotation_angle(double omega_sq, double omega_alpha, double gamma_alpha) {
    const double off = -2.0 * gamma_alpha * omega_alpha * omega_alpha;
    return 0.5 * std::atan2(off, omega_sq - omega_alpha * omega_alpha);
}

ModePair mode_frequencies(double theta, double omega_sq, double omega_alpha, double gamma_alpha) {
    const double a = std::sin(theta);
    const double b = std::cos(theta);
    const double wa2 = omega_alpha * omega_alpha;
    const double wprime_sq = -2.0 * gamma_alpha * wa2;
    const double plus_sq = omega_sq * b * b + wa2 * a * a + wprime_sq * a * b;
    const double minus_sq = omega_sq * a * a + wa2 * b * b - wprime_sq * a * b;
    if (!(plus_sq > 0.0) || !(minus_sq > 0.0)) {
        std::ostringstream msg;
        msg << "non-positive normal mode: omega+^2 = " << plus_sq << ", omega-^2 = " << minus_sq;
        throw NonPositiveMode(msg.str());
    }
    ModePair m;
    m.theta = theta;
    m.a = a;
    m.b = b;
    m.omega_plus = std::sqrt(plus_sq);
    m.omega_minus = std::sqrt(minus_sq);
    m.delta = m.omega_plus - m.omega_minus;
    return m;
}

double rotated_cross_term(double theta, double omega_sq, double omega_alpha, double gamma_alpha) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double wa2 = omega_alpha * omega_alpha;
    return (wa2 - omega_sq) * s * c - gamma_alpha * wa2 * (c * c - s * s);
}

NormalCoords to_normal_coords(double q, double x_alpha, double theta, std::size_t n_modes) {
    const double a = std::sin(theta);
    const double b = std::cos(theta);
    const double qs = q / static_cast<double>(n_modes);
    return {b * qs + a * x_alpha, -a * qs + b * x_alpha};
}

std::pair<double, double> from_normal_coords(NormalCoords c, double theta, std::size_t n_modes) {
    const double a = std::sin(theta);
    const double b = std::cos(theta);
    const double qs = b * c.x_plus - a * c.x_minus;
    const double x = a * c.x_plus + b * c.x_minus;
    return {qs * static_cast<double>(n_modes), x};
}

GroundState::GroundState(std::vector<ModePair> modes, double hbar, double omega_sq)
    : modes_(std::move(modes)), hbar_(hbar), omega_sq_(omega_sq) {
    const std::size_t n = modes_.size();
    if (n == 0) throw InvalidSpec("ground state needs at least one bath mode");
    const double nd = static_cast<double>(n);

    m_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
    b_weights_.resize(n);
    double mqq = 0.0;
    for (std::size_t al = 0; al < n; ++al) {
        const ModePair& m = modes_[al];
        const auto i = static_cast<Eigen::Index>(al + 1);
        mqq += (m.b * m.b * m.omega_plus + m.a * m.a * m.omega_minus) / (nd * nd);
        m_(0, i) = m.a * m.b * m.delta / nd;
        m_(i, 0) = m_(0, i);
        m_(i, i) = m.a * m.a * m.omega_plus + m.b * m.b * m.omega_minus;
        b_weights_[al] = 2.0 * m.a * m.b * m.delta / nd;
    }
    m_(0, 0) = mqq;

    Eigen::LLT<Eigen::MatrixXd> llt(m_);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m_, Eigen::EigenvaluesOnly);
        std::ostringstream msg;
        msg << "Cholesky factorization of the ground-state precision failed; eigenvalue range ["
            << eig.eigenvalues().minCoeff() << ", " << eig.eigenvalues().maxCoeff() << "]";
        throw CholeskyFailure(msg.str());
    }
    chol_ = llt.matrixL();
}

double GroundState::B(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t al = 0; al < b_weights_.size(); ++al) sum += b_weights_[al] * x[al];
    return sum;
}

double GroundState::quadratic_form(double q, std::span<const double> x) const {
    double sum = A() * q * q;
    for (std::size_t al = 0; al < n_modes(); ++al) {
        sum += 2.0 * coupling_entry(al) * q * x[al] + bath_diagonal(al) * x[al] * x[al];
    }
    return sum;
}

std::vector<double> GroundState::apply_precision(double q, std::span<const double> x) const {
    std::vector<double> out(n_modes() + 1);
    double head = A() * q;
    for (std::size_t al = 0; al < n_modes(); ++al) {
        head += coupling_entry(al) * x[al];
        out[al + 1] = coupling_entry(al) * q + bath_diagonal(al) * x[al];
    }
    out[0] = head;
    return out;
}

double GroundState::log_wavefunction(double q, std::span<const double> x) const {
    const std::size_t n = n_modes();
    double sum = 0.0;
    for (std::size_t al = 0; al < n; ++al) {
        const ModePair& m = modes_[al];
        const NormalCoords c = to_normal_coords(q, x[al], m.theta, n);
        const double norm = 0.25 * std::log(m.omega_plus * m.omega_minus /
                                            (std::numbers::pi * std::numbers::pi * hbar_ * hbar_));
        sum += norm - m.omega_plus * c.x_plus * c.x_plus / (2.0 * hbar_) -
               m.omega_minus * c.x_minus * c.x_minus / (2.0 * hbar_);
    }
    return sum;
}

double GroundState::wavefunction(double q, std::span<const double> x) const {
    const std::size_t n = n_modes();
    double prod = 1.0;
    for (std::size_t al = 0; al < n; ++al) {
        const ModePair& m = modes_[al];
        const NormalCoords c = to_normal_coords(q, x[al], m.theta, n);
        prod *= std::pow(m.omega_plus * m.omega_minus /
                             (std::numbers::pi * std::numbers::pi * hbar_ * hbar_),
                         0.25) *
                std::exp(-m.omega_plus * c.x_plus * c.x_plus / (2.0 * hbar_)) *
                std::exp(-m.omega_minus * c.x_minus * c.x_minus / (2.0 * hbar_));
    }
    return prod;
}

Eigen::MatrixXd GroundState::position_covariance() const {
    Eigen::LLT<Eigen::MatrixXd> llt(m_);
    const auto dim = m_.rows();
    return 0.5 * hbar_ * llt.solve(Eigen::MatrixXd::Identity(dim, dim));
}

GroundState build_ground_state(const SystemParams& params, const BathRealization& bath) {
    params.validate();
    if (bath.size() == 0) throw InvalidSpec("bath must contain at least one mode");
    const double omega_sq = effective_frequency_squared(params, bath);
    std::vector<ModePair> modes;
    modes.reserve(bath.size());
    for (std::size_t al = 0; al < bath.size(); ++al) {
        const double theta = rotation_angle(omega_sq, bath.omega[al], bath.gamma[al]);
        modes.push_back(mode_frequencies(theta, omega_sq, bath.omega[al], bath.gamma[al]));
    }
    return GroundState(std::move(modes), params.hbar, omega_sq);
}

namespace {

void sample_chunk(const GroundState& gs, std::uint64_t seed, std::size_t chunk,
                  std::span<PhasePoint> out) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    const std::size_t n = gs.n_modes();
    const auto dim = static_cast<Eigen::Index>(n + 1);
    const Eigen::MatrixXd& lower = gs.cholesky_factor();
    const double scale = std::sqrt(0.5 * gs.hbar());
    Eigen::VectorXd z(dim);
    Eigen::VectorXd u(dim);

    for (PhasePoint& point : out) {
        // positions: L^T y = z gives cov(y) = M^{-1}
        for (Eigen::Index i = 0; i < dim; ++i) z(i) = normal(rng);
        Eigen::VectorXd pos = lower.transpose().triangularView<Eigen::Upper>().solve(z);
        // momenta: L u gives cov = M
        for (Eigen::Index i = 0; i < dim; ++i) u(i) = normal(rng);
        Eigen::VectorXd mom = lower.triangularView<Eigen::Lower>() * u;

        point.q = scale * pos(0);
        point.p = scale * mom(0);
        point.x.resize(n);
        point.p_bath.resize(n);
        for (std::size_t al = 0; al < n; ++al) {
            const auto i = static_cast<Eigen::Index>(al + 1);
            point.x[al] = scale * pos(i);
            point.p_bath[al] = scale * mom(i);
        }
    }
}

}  // namespace

std::vector<PhasePoint> sample_ground_state(const GroundState& gs, std::uint64_t seed,
                                            std::size_t count, unsigned threads) {
    if (count < 1) throw InvalidSpec("sample count must be at least 1");
    std::vector<PhasePoint> out(count);
    const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    auto run = [&](std::size_t first, std::size_t stride) {
        for (std::size_t c = first; c < chunks; c += stride) {
            const std::size_t begin = c * kSampleChunk;
            const std::size_t len = std::min(kSampleChunk, count - begin);
            sample_chunk(gs, seed, c, std::span<PhasePoint>(out).subspan(begin, len));
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (threads == 1) {
        run(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run, t, threads);
    }
    return out;
}

}  // namespace qbath
