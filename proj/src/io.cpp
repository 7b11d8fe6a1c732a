#include "qbath/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "qbath/config.hpp"
#include "qbath/errors.hpp"
#include "qbath/potentials.hpp"

namespace qbath {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    double v = 0.0;
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw InputError("csv line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
    }
    return v;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InputError("csv has no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    return parse_cell(rows.at(row).at(col), row + 1);
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            table.comments.push_back(line.substr(1));
            continue;
        }
        if (table.header.empty()) {
            table.header = split(line, ',');
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != table.header.size()) {
            throw InputError("csv line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(table.header.size()));
        }
        table.rows.push_back(cells);
    }
    if (table.header.empty()) throw InputError("csv has no header");
    return table;
}

void write_bath_csv(std::ostream& out, const BathRealization& bath) {
    out << "alpha,omega,gamma,gamma_bar,weight\n";
    for (std::size_t a = 0; a < bath.size(); ++a) {
        out << a + 1 << ',' << format_double(bath.omega[a]) << ',' << format_double(bath.gamma[a]) << ','
            << format_double(bath.gamma_bar[a]) << ',' << format_double(bath.weight(a)) << '\n';
    }
}

void write_modes_csv(std::ostream& out, const GroundState& gs) {
    out << "alpha,theta,omega_plus,omega_minus\n";
    for (std::size_t a = 0; a < gs.n_modes(); ++a) {
        const ModePair& m = gs.modes()[a];
        out << a + 1 << ',' << format_double(m.theta) << ',' << format_double(m.omega_plus) << ','
            << format_double(m.omega_minus) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::uint64_t seed) {
    out << "# method=" << to_string(traj.label) << " dt=" << format_double(traj.dt) << " seed=" << seed
        << '\n';
    out << "t,q,qdot\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_double(traj.time(k)) << ',' << format_double(traj.q[k]) << ','
            << format_double(traj.qdot[k]) << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    const CsvTable table = read_csv(in);
    Trajectory traj;
    bool have_dt = false;
    for (const auto& c : table.comments) {
        std::istringstream ss(c);
        std::string token;
        while (ss >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            if (key == "method") traj.label = parse_method(value);
            if (key == "dt") {
                traj.dt = parse_cell(value, 1);
                have_dt = true;
            }
        }
    }
    const std::size_t ct = table.column("t");
    const std::size_t cq = table.column("q");
    const std::size_t cv = table.column("qdot");
    if (table.rows.size() < 2) throw InputError("trajectory needs at least two rows");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        traj.q.push_back(table.number(r, cq));
        traj.qdot.push_back(table.number(r, cv));
    }
    traj.t0 = table.number(0, ct);
    if (!have_dt) traj.dt = table.number(1, ct) - traj.t0;
    return traj;
}

void write_samples_csv(std::ostream& out, std::span<const PhasePoint> samples, bool with_momenta) {
    const std::size_t n = samples.empty() ? 0 : samples.front().size();
    out << "sample_id,q";
    for (std::size_t a = 1; a <= n; ++a) out << ",x_" << a;
    if (with_momenta) {
        out << ",p";
        for (std::size_t a = 1; a <= n; ++a) out << ",p_" << a;
    }
    out << '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const PhasePoint& s = samples[i];
        out << i << ',' << format_double(s.q);
        for (double x : s.x) out << ',' << format_double(x);
        if (with_momenta) {
            out << ',' << format_double(s.p);
            for (double p : s.p_bath) out << ',' << format_double(p);
        }
        out << '\n';
    }
}

void write_metrics_csv(std::ostream& out, std::span<const Metric> metrics) {
    out << "metric,value\n";
    for (const auto& [name, value] : metrics) out << name << ',' << format_double(value) << '\n';
}

void write_force_scan_csv(std::ostream& out, const GroundState& gs, const BathRealization& bath,
                          std::span<const double> x_fixed, const std::string& slice_label,
                          double q_min, double q_max, std::size_t points) {
    if (points < 2) throw InvalidSpec("force scan needs at least two points");
    out << "q,x_slice_spec,V,Q,force\n";
    PhasePoint pt = PhasePoint::zeros(bath.size());
    pt.x.assign(x_fixed.begin(), x_fixed.end());
    for (std::size_t i = 0; i < points; ++i) {
        pt.q = q_min + (q_max - q_min) * static_cast<double>(i) / static_cast<double>(points - 1);
        out << format_double(pt.q) << ',' << slice_label << ','
            << format_double(classical_potential(pt, gs.omega_sq(), bath)) << ','
            << format_double(quantum_potential(pt, gs)) << ','
            << format_double(bohmian_force(pt, gs, bath)) << '\n';
    }
}

namespace {

std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

}  // namespace

void write_svg_plot(std::ostream& out, std::span<const PlotSeries> series, const std::string& title,
                    const std::string& x_label, const std::string& y_label) {
    constexpr double width = 800.0;
    constexpr double height = 600.0;
    constexpr double left = 80.0, right = 30.0, top = 50.0, bottom = 70.0;

    double t_min = std::numeric_limits<double>::infinity(), t_max = -t_min;
    double y_min = t_min, y_max = -t_min;
    for (const auto& s : series) {
        for (double t : s.t) {
            t_min = std::min(t_min, t);
            t_max = std::max(t_max, t);
        }
        for (double y : s.y) {
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!(t_max > t_min)) t_max = t_min + 1.0;
    if (!(y_max > y_min)) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto px = [&](double t) { return left + (t - t_min) / (t_max - t_min) * plot_w; };
    auto py = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
    out << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
        << title << "</text>\n";

    // axes box and ticks
    out << "<rect x=\"" << svg_number(left) << "\" y=\"" << svg_number(top) << "\" width=\""
        << svg_number(plot_w) << "\" height=\"" << svg_number(plot_h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = t_min + (t_max - t_min) * i / 5.0;
        const double y = y_min + (y_max - y_min) * i / 5.0;
        out << "<line x1=\"" << svg_number(px(t)) << "\" y1=\"" << svg_number(top + plot_h) << "\" x2=\""
            << svg_number(px(t)) << "\" y2=\"" << svg_number(top + plot_h + 6) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << svg_number(px(t)) << "\" y=\"" << svg_number(top + plot_h + 22)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(t)
            << "</text>\n";
        out << "<line x1=\"" << svg_number(left - 6) << "\" y1=\"" << svg_number(py(y)) << "\" x2=\""
            << svg_number(left) << "\" y2=\"" << svg_number(py(y)) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << svg_number(left - 10) << "\" y=\"" << svg_number(py(y) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << tick_label(y)
            << "</text>\n";
    }
    if (y_min < 0.0 && y_max > 0.0) {
        out << "<line x1=\"" << svg_number(left) << "\" y1=\"" << svg_number(py(0.0)) << "\" x2=\""
            << svg_number(left + plot_w) << "\" y2=\"" << svg_number(py(0.0))
            << "\" stroke=\"#999\" stroke-dasharray=\"4,4\"/>\n";
    }
    out << "<text x=\"" << svg_number(left + plot_w / 2) << "\" y=\"" << svg_number(height - 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << x_label << "</text>\n";
    out << "<text x=\"20\" y=\"" << svg_number(top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" transform=\"rotate(-90 20 "
        << svg_number(top + plot_h / 2) << ")\">" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const PlotSeries& ser = series[s];
        const std::size_t n = std::min(ser.t.size(), ser.y.size());
        // at most ~2000 vertices per polyline
        const std::size_t stride = std::max<std::size_t>(1, n / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < n; k += stride) {
            out << svg_number(px(ser.t[k])) << ',' << svg_number(py(ser.y[k])) << ' ';
        }
        if (n > 0 && (n - 1) % stride != 0) {
            out << svg_number(px(ser.t[n - 1])) << ',' << svg_number(py(ser.y[n - 1]));
        }
        out << "\"/>\n";
        const double ly = top + 20.0 + 22.0 * static_cast<double>(s);
        const double lx = left + plot_w - 150.0;
        out << "<line x1=\"" << svg_number(lx) << "\" y1=\"" << svg_number(ly) << "\" x2=\""
            << svg_number(lx + 30) << "\" y2=\"" << svg_number(ly) << "\" stroke=\"" << ser.color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << svg_number(lx + 38) << "\" y=\"" << svg_number(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"14\">" << ser.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace qbath
