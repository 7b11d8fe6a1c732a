#pragma once

#include <cstddef>
#include <string_view>

#include "qbath/dynamics.hpp"

namespace qbath {

// A e^{-decay t} sin(frequency t + phase), with t measured from the trajectory start.
struct DampedSineFit {
    double amplitude{0.0};
    double decay_rate{0.0};
    double frequency{0.0};
    double phase{0.0};
    double residual_rms{0.0};
    std::size_t iterations{0};
    bool converged{false};

    double operator()(double t) const;
};

struct FitOptions {
    std::size_t max_iterations{100};
    double tolerance{1e-10};  // relative parameter update
    // Throw NoConvergence instead of returning the best iterate with converged = false.
    bool require_convergence{false};
};

// Seeds from zero-crossing spacing and the log-decrement of successive lobe
// peaks, then refines all four parameters by Gauss-Newton.
DampedSineFit fit_damped_sine(const Trajectory& traj, const FitOptions& options = {});

struct ComparisonMetrics {
    double relative_l2{0.0};
    double max_abs_diff{0.0};
    double frequency_ratio{1.0};  // fitted frequency of b over a
    double decay_ratio{1.0};      // fitted decay rate of b over a
};

ComparisonMetrics compare_trajectories(const Trajectory& a, const Trajectory& b);

enum class Regime { regime1, regime2, intermediate };

std::string_view to_string(Regime r) noexcept;

struct RegimeClass {
    Regime regime{Regime::intermediate};
    double ratio{0.0};  // omega_c^2 / omega0
};

inline constexpr double kRegime1Threshold = 1.0;
inline constexpr double kRegime2Threshold = 0.1;

// regime1 when omega_c^2 / omega0 > 1, regime2 when it is <= 0.1.
RegimeClass classify_regime(double omega0, double omega_c);

}  // namespace qbath
