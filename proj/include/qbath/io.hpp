#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbath/bath.hpp"
#include "qbath/dynamics.hpp"
#include "qbath/modes.hpp"

namespace qbath {

// CSV with one header row and `#` comment lines. Cells are kept as text;
// number() parses on access.
struct CsvTable {
    std::vector<std::string> comments;  // without the leading '#'
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
    double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(std::istream& in);

void write_bath_csv(std::ostream& out, const BathRealization& bath);
void write_modes_csv(std::ostream& out, const GroundState& gs);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::uint64_t seed);
Trajectory read_trajectory_csv(std::istream& in);

// sample_id,q,x_1..x_N and, with momenta, p,p_1..p_N.
void write_samples_csv(std::ostream& out, std::span<const PhasePoint> samples, bool with_momenta);

using Metric = std::pair<std::string, double>;
void write_metrics_csv(std::ostream& out, std::span<const Metric> metrics);

// q,x_slice_spec,V,Q,force along q at fixed bath coordinates.
void write_force_scan_csv(std::ostream& out, const GroundState& gs, const BathRealization& bath,
                          std::span<const double> x_fixed, const std::string& slice_label,
                          double q_min, double q_max, std::size_t points);

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<double> t;
    std::vector<double> y;
};

// 800x600 line plot with axes, tick labels and a legend.
void write_svg_plot(std::ostream& out, std::span<const PlotSeries> series, const std::string& title,
                    const std::string& x_label, const std::string& y_label);

}  // namespace qbath
