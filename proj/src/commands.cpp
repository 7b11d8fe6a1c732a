#include "qbath/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qbath/errors.hpp"
#include "qbath/modes.hpp"
#include "qbath/potentials.hpp"

namespace qbath {

namespace fs = std::filesystem;

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "svg") return OutputFormat::svg;
    if (text == "both") return OutputFormat::both;
    throw ConfigError("unknown format '" + std::string(text) + "' (expected csv, svg or both)");
}

namespace {

constexpr std::size_t kSampleDumpLimit = 1000;

bool wants_csv(const CommandContext& ctx) { return ctx.format != OutputFormat::svg; }
bool wants_svg(const CommandContext& ctx) { return ctx.format != OutputFormat::csv; }

void say(const CommandContext& ctx, const std::string& text) {
    if (ctx.log) *ctx.log << text << '\n';
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("error while writing " + path.string());
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

nlohmann::json json_number(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

// Manifest and resolved config go out before any data file.
void write_manifest(const RunConfig& cfg, const CommandContext& ctx, std::string_view command,
                    const std::vector<std::string>& outputs, const std::vector<Metric>& derived,
                    const std::vector<std::pair<std::string, std::string>>& labels) {
    prepare_dir(ctx.out_dir);
    {
        const fs::path path = ctx.out_dir / "config.resolved";
        std::ofstream out = open_output(path);
        out << cfg.echo_text();
        finish(out, path);
    }
    nlohmann::ordered_json m;
    m["tool"] = "qbath";
    m["version"] = kToolVersion;
    m["command"] = std::string(command);
    m["timestamp"] = ctx.timestamp ? utc_timestamp() : std::string();
    m["config"] = cfg.echo();
    nlohmann::json files = nlohmann::json::array({"config.resolved"});
    for (const auto& o : outputs) files.push_back(o);
    m["outputs"] = files;
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (const auto& [k, v] : derived) d[k] = json_number(v);
    for (const auto& [k, v] : labels) d[k] = v;
    m["derived"] = d;

    const fs::path path = ctx.out_dir / "manifest.json";
    std::ofstream out = open_output(path);
    out << m.dump(2) << '\n';
    finish(out, path);
}

template <class Writer>
fs::path emit(const CommandContext& ctx, const std::string& name, Writer&& write) {
    const fs::path path = ctx.out_dir / name;
    std::ofstream out = open_output(path);
    write(out);
    finish(out, path);
    return path;
}

std::string describe(const std::vector<Metric>& metrics) {
    std::ostringstream out;
    for (const auto& [k, v] : metrics) out << "  " << k << " = " << format_double(v) << '\n';
    return out.str();
}

std::vector<Metric> bath_derived(const RunConfig& cfg, const BathRealization& bath,
                                 std::vector<std::pair<std::string, std::string>>& labels) {
    std::vector<Metric> d;
    d.emplace_back("sum_gamma_sq_omega_sq", bath.total_weight());
    d.emplace_back("omega_sq", effective_frequency_squared(cfg.system, bath));
    double xi_sq = std::numeric_limits<double>::quiet_NaN();
    try {
        xi_sq = bohmian_coefficients(build_ground_state(cfg.system, bath), bath).xi_sq;
    } catch (const NegativeXiSq&) {
        labels.emplace_back("xi_sq_status", "non-positive");
    }
    d.emplace_back("xi_sq", xi_sq);
    const RegimeClass rc = classify_regime(cfg.system.omega0, cfg.bath.omega_c);
    d.emplace_back("regime_ratio", rc.ratio);
    labels.emplace_back("regime", std::string(to_string(rc.regime)));
    return d;
}

// Rethrows integrator failures with the method name attached, keeping the error family.
template <class F>
auto with_method(Method m, F&& f) {
    try {
        return f();
    } catch (const InputError& e) {
        throw InputError("method " + std::string(to_string(m)) + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError("method " + std::string(to_string(m)) + ": " + e.what());
    }
}

}  // namespace

XiChoice choose_xi(const RunConfig& cfg, const BathRealization& bath) {
    XiChoice c;
    c.xi_dominant = std::sqrt(cfg.bath.lambda_q_prime * std::pow(cfg.bath.omega_c, 4));
    c.xi_omega = std::sqrt(effective_frequency_squared(cfg.system, bath));
    c.xi_exact = std::numeric_limits<double>::quiet_NaN();
    try {
        c.xi_exact = bohmian_coefficients(build_ground_state(cfg.system, bath), bath).xi();
    } catch (const NegativeXiSq&) {
        if (cfg.xi_mode == XiMode::exact) throw;
    }

    c.mode = cfg.xi_mode;
    if (c.mode == XiMode::automatic) {
        const bool regime1 = classify_regime(cfg.system.omega0, cfg.bath.omega_c).regime == Regime::regime1;
        c.mode = regime1 ? XiMode::dominant : XiMode::exact;
    }
    switch (c.mode) {
        case XiMode::dominant: c.xi = c.xi_dominant; break;
        case XiMode::omega: c.xi = c.xi_omega; break;
        default:
            if (!std::isfinite(c.xi_exact)) throw NegativeXiSq("exact xi is not defined for this bath");
            c.xi = c.xi_exact;
            break;
    }
    return c;
}

CommandResult cmd_bath(const RunConfig& cfg, const CommandContext& ctx) {
    const BathRealization bath = discretize_ohmic(cfg.bath);
    const GroundState gs = build_ground_state(cfg.system, bath);

    std::vector<std::pair<std::string, std::string>> labels;
    CommandResult result;
    result.metrics = bath_derived(cfg, bath, labels);
    result.metrics.emplace_back("kernel_T0", memory_kernel_discrete(bath, 0.0));
    write_manifest(cfg, ctx, "bath", {"bath.csv", "modes.csv"}, result.metrics, labels);

    result.outputs.push_back(emit(ctx, "bath.csv", [&](std::ostream& o) { write_bath_csv(o, bath); }));
    result.outputs.push_back(emit(ctx, "modes.csv", [&](std::ostream& o) { write_modes_csv(o, gs); }));
    say(ctx, "bath: " + std::to_string(bath.size()) + " modes (" +
                 std::string(to_string(cfg.bath.discretization)) + ")\n" + describe(result.metrics));
    return result;
}

CommandResult cmd_kernel(const RunConfig& cfg, const CommandContext& ctx) {
    const BathRealization bath = discretize_ohmic(cfg.bath);
    const std::size_t steps = step_count(cfg.dt, cfg.t_end);
    std::vector<double> discrete(steps + 1), continuum(steps + 1);
    double max_diff = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = cfg.dt * static_cast<double>(k);
        discrete[k] = memory_kernel_discrete(bath, t);
        continuum[k] = memory_kernel_continuum(cfg.bath.lambda_q_prime, cfg.bath.omega_c, t);
        max_diff = std::max(max_diff, std::abs(discrete[k] - continuum[k]));
    }

    CommandResult result;
    result.metrics = {{"kernel_T0_discrete", discrete.front()},
                      {"kernel_T0_continuum", continuum.front()},
                      {"max_abs_diff", max_diff}};
    write_manifest(cfg, ctx, "kernel", {"kernel.csv"}, result.metrics, {});
    result.outputs.push_back(emit(ctx, "kernel.csv", [&](std::ostream& o) {
        o << "t,discrete,continuum\n";
        for (std::size_t k = 0; k <= steps; ++k) {
            o << format_double(cfg.dt * static_cast<double>(k)) << ',' << format_double(discrete[k]) << ','
              << format_double(continuum[k]) << '\n';
        }
    }));
    say(ctx, "kernel:\n" + describe(result.metrics));
    return result;
}

CommandResult cmd_sample(const RunConfig& cfg, const CommandContext& ctx) {
    if (cfg.sample_count < 100) throw InvalidSpec("sample_count must be at least 100");
    const BathRealization bath = discretize_ohmic(cfg.bath);
    const GroundState gs = build_ground_state(cfg.system, bath);
    const BohmianCoefficients coeffs = bohmian_coefficients(gs, bath);
    const std::size_t n = gs.n_modes();
    const std::size_t dim = n + 1;

    std::vector<std::pair<std::string, std::string>> labels;
    std::vector<Metric> derived = bath_derived(cfg, bath, labels);
    write_manifest(cfg, ctx, "sample", {"sample_report.csv", "samples.csv", "force_scan.csv"}, derived,
                   labels);

    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    const std::vector<PhasePoint> samples =
        sample_ground_state(gs, cfg.bath.seed, cfg.sample_count, threads);
    const std::size_t count = samples.size();

    // coordinate means: positions then momenta
    CommandResult result;
    bool means_ok = true;
    double worst_z = 0.0;
    std::vector<double> column(count);
    auto check_mean = [&](auto&& get) {
        for (std::size_t i = 0; i < count; ++i) column[i] = get(samples[i]);
        const MeanEstimate e = estimate_mean(column);
        const double z = e.std_error > 0.0 ? std::abs(e.mean) / e.std_error : 0.0;
        worst_z = std::max(worst_z, z);
        if (z >= 4.0) means_ok = false;
        return e;
    };
    check_mean([](const PhasePoint& s) { return s.q; });
    check_mean([](const PhasePoint& s) { return s.p; });
    for (std::size_t a = 0; a < n; ++a) {
        check_mean([a](const PhasePoint& s) { return s.x[a]; });
        check_mean([a](const PhasePoint& s) { return s.p_bath[a]; });
    }
    result.metrics.emplace_back("coordinate_mean_max_z", worst_z);

    // covariance of positions vs (hbar/2) M^{-1}, scaled by sqrt(C_ii C_jj)
    const Eigen::MatrixXd exact = gs.position_covariance();
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (const PhasePoint& s : samples) {
        v(0) = s.q;
        for (std::size_t a = 0; a < n; ++a) v(static_cast<Eigen::Index>(a + 1)) = s.x[a];
        emp.noalias() += v * v.transpose();
    }
    emp /= static_cast<double>(count);
    double worst_cov = 0.0;
    for (Eigen::Index i = 0; i < emp.rows(); ++i) {
        for (Eigen::Index j = 0; j < emp.cols(); ++j) {
            const double scale = std::sqrt(exact(i, i) * exact(j, j));
            worst_cov = std::max(worst_cov, std::abs(emp(i, j) - exact(i, j)) / scale);
        }
    }
    const bool cov_ok = worst_cov < 0.05;
    result.metrics.emplace_back("covariance_max_scaled_error", worst_cov);

    const MeanEstimate eta = check_mean([&](const PhasePoint& s) { return coeffs.eta(s.x); });
    result.metrics.emplace_back("eta_mean", eta.mean);
    result.metrics.emplace_back("eta_stderr", eta.std_error);
    for (double t : {0.0, 1.0, 5.0}) {
        const MeanEstimate r = check_mean([&](const PhasePoint& s) {
            return classical_noise(s.x, s.p_bath, s.q, bath, t);
        });
        result.metrics.emplace_back("noise_mean_t" + format_double(t), r.mean);
        result.metrics.emplace_back("noise_stderr_t" + format_double(t), r.std_error);
    }
    result.metrics.emplace_back("means_pass", means_ok ? 1.0 : 0.0);
    result.metrics.emplace_back("covariance_pass", cov_ok ? 1.0 : 0.0);
    result.passed = means_ok && cov_ok;

    result.outputs.push_back(emit(ctx, "sample_report.csv",
                                  [&](std::ostream& o) { write_metrics_csv(o, result.metrics); }));
    result.outputs.push_back(emit(ctx, "samples.csv", [&](std::ostream& o) {
        const std::size_t dump = std::min(count, kSampleDumpLimit);
        write_samples_csv(o, std::span<const PhasePoint>(samples).first(dump), true);
    }));
    result.outputs.push_back(emit(ctx, "force_scan.csv", [&](std::ostream& o) {
        const double width = 4.0 * std::sqrt(exact(0, 0));
        write_force_scan_csv(o, gs, bath, samples.front().x, "sample0", -width, width, 201);
    }));

    std::ostringstream summary;
    summary << "sample: " << count << " ground-state samples, N = " << n << '\n'
            << describe(result.metrics) << "  result: " << (result.passed ? "PASS" : "FAIL");
    say(ctx, summary.str());
    return result;
}

CommandResult cmd_simulate(const RunConfig& cfg, const CommandContext& ctx) {
    if (ctx.methods.empty()) throw ConfigError("simulate needs at least one method");
    for (Method m : ctx.methods) {
        if (m != Method::full && m != Method::gle && m != Method::markov_quantum && m != Method::bohmian) {
            throw ConfigError("simulate does not support method " + std::string(to_string(m)));
        }
    }
    auto has = [&](Method m) {
        return std::find(ctx.methods.begin(), ctx.methods.end(), m) != ctx.methods.end();
    };

    const BathRealization bath = discretize_ohmic(cfg.bath);
    const GroundState gs = build_ground_state(cfg.system, bath);

    // shared initial data: configured system state, bath drawn from the ground state
    PhasePoint initial = sample_ground_state(gs, cfg.bath.seed, 1).front();
    initial.q = cfg.q0;
    initial.p = cfg.qdot0;

    std::vector<std::pair<std::string, std::string>> labels;
    std::vector<Metric> derived = bath_derived(cfg, bath, labels);
    std::optional<XiChoice> xi;
    if (has(Method::bohmian)) {
        xi = choose_xi(cfg, bath);
        derived.emplace_back("xi", xi->xi);
        labels.emplace_back("xi_mode", std::string(to_string(xi->mode)));
    }
    std::vector<std::string> files;
    if (wants_csv(ctx)) {
        for (Method m : ctx.methods) files.push_back("traj_" + std::string(to_string(m)) + ".csv");
        files.push_back("compare_report.csv");
    }
    if (wants_svg(ctx)) files.push_back("simulate.svg");
    write_manifest(cfg, ctx, "simulate", files, derived, labels);

    std::vector<Trajectory> trajs;
    for (Method m : ctx.methods) {
        trajs.push_back(with_method(m, [&]() -> Trajectory {
            switch (m) {
                case Method::full:
                    return integrate_full_hamiltonian(initial, cfg.system, bath, cfg.dt, cfg.t_end);
                case Method::gle:
                    return integrate_gle(cfg.q0, cfg.qdot0, bath, cfg.system, initial, cfg.dt, cfg.t_end);
                case Method::markov_quantum:
                    return integrate_gle(cfg.q0, cfg.qdot0, bath, cfg.system, std::nullopt, cfg.dt,
                                         cfg.t_end, GleOptions{KernelModel::markov});
                default:
                    return integrate_damped_oscillator(xi->xi, cfg.system.lambda_b, cfg.q0, cfg.qdot0,
                                                       cfg.dt, cfg.t_end, Method::bohmian);
            }
        }));
    }
    auto find = [&](Method m) -> const Trajectory& {
        const auto it = std::find(ctx.methods.begin(), ctx.methods.end(), m);
        return trajs[static_cast<std::size_t>(it - ctx.methods.begin())];
    };

    CommandResult result;
    result.metrics = derived;
    if (has(Method::full) && has(Method::gle)) {
        const ComparisonMetrics c = compare_trajectories(find(Method::full), find(Method::gle));
        result.metrics.emplace_back("full_vs_gle_relative_l2", c.relative_l2);
        result.metrics.emplace_back("full_vs_gle_max_abs_diff", c.max_abs_diff);
        if (!(c.relative_l2 < 1e-3)) result.passed = false;
    }
    auto versus_analytic = [&](Method m, double omega, double lambda, const std::string& name) {
        const Trajectory& tr = find(m);
        const LangevinParams p = LangevinParams::from_initial(omega, lambda, cfg.q0, cfg.qdot0);
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            worst = std::max(worst, std::abs(tr.q[k] - quantum_langevin_analytic(tr.time(k), p)));
        }
        result.metrics.emplace_back(name, worst);
        if (!(worst < 1e-6)) result.passed = false;
    };
    if (has(Method::markov_quantum)) {
        versus_analytic(Method::markov_quantum, cfg.system.omega0, cfg.system.lambda_q,
                        "markov_quantum_vs_analytic_max_abs");
    }
    if (has(Method::bohmian)) {
        versus_analytic(Method::bohmian, xi->xi, cfg.system.lambda_b, "bohmian_vs_analytic_max_abs");
    }

    if (wants_csv(ctx)) {
        for (const Trajectory& tr : trajs) {
            result.outputs.push_back(emit(ctx, "traj_" + std::string(to_string(tr.label)) + ".csv",
                                          [&](std::ostream& o) { write_trajectory_csv(o, tr, cfg.bath.seed); }));
        }
        result.outputs.push_back(emit(ctx, "compare_report.csv",
                                      [&](std::ostream& o) { write_metrics_csv(o, result.metrics); }));
    }
    if (wants_svg(ctx)) {
        static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
        std::vector<PlotSeries> series;
        for (std::size_t i = 0; i < trajs.size(); ++i) {
            PlotSeries s{std::string(to_string(trajs[i].label)), palette[i % 4], {}, trajs[i].q};
            for (std::size_t k = 0; k < trajs[i].size(); ++k) s.t.push_back(trajs[i].time(k));
            series.push_back(std::move(s));
        }
        result.outputs.push_back(emit(ctx, "simulate.svg", [&](std::ostream& o) {
            write_svg_plot(o, series, "central oscillator q(t)", "t", "q");
        }));
    }
    say(ctx, "simulate:\n" + describe(result.metrics) + "  result: " + (result.passed ? "PASS" : "FAIL"));
    return result;
}

CommandResult cmd_compare(const RunConfig& cfg, const CommandContext& ctx) {
    auto load = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw IoError("cannot open trajectory " + p.string());
        return read_trajectory_csv(in);
    };
    if (ctx.compare_a.empty() || ctx.compare_b.empty()) {
        throw ConfigError("compare needs two trajectory files (--a, --b)");
    }
    const Trajectory a = load(ctx.compare_a);
    const Trajectory b = load(ctx.compare_b);
    const ComparisonMetrics c = compare_trajectories(a, b);

    CommandResult result;
    result.metrics = {{"relative_l2", c.relative_l2},
                      {"max_abs_diff", c.max_abs_diff},
                      {"frequency_ratio", c.frequency_ratio},
                      {"decay_ratio", c.decay_ratio}};
    write_manifest(cfg, ctx, "compare", {"compare.csv"}, {}, {});
    result.outputs.push_back(
        emit(ctx, "compare.csv", [&](std::ostream& o) { write_metrics_csv(o, result.metrics); }));
    say(ctx, "compare " + ctx.compare_a.string() + " vs " + ctx.compare_b.string() + ":\n" +
                 describe(result.metrics));
    return result;
}

CommandResult cmd_figure1(const RunConfig& cfg, const CommandContext& ctx) {
    const BathRealization bath = discretize_ohmic(cfg.bath);
    const XiChoice xi = choose_xi(cfg, bath);
    const RegimeClass rc = classify_regime(cfg.system.omega0, cfg.bath.omega_c);

    const LangevinParams quantum{cfg.system.omega0, cfg.system.lambda_q, 1.0, std::numbers::pi / 2};
    const LangevinParams bohmian{xi.xi, cfg.system.lambda_b, 1.0, std::numbers::pi / 2};

    std::vector<Metric> derived = {{"omega_sq", effective_frequency_squared(cfg.system, bath)},
                                   {"xi", xi.xi},
                                   {"xi_exact", xi.xi_exact},
                                   {"xi_dominant", xi.xi_dominant},
                                   {"xi_omega", xi.xi_omega},
                                   {"regime_ratio", rc.ratio}};
    std::vector<std::pair<std::string, std::string>> labels = {
        {"regime", std::string(to_string(rc.regime))}, {"xi_mode", std::string(to_string(xi.mode))}};
    std::vector<std::string> files;
    if (wants_csv(ctx)) {
        files.push_back("figure1.csv");
        files.push_back("figure1_report.csv");
    }
    if (wants_svg(ctx)) files.push_back("figure1.svg");
    write_manifest(cfg, ctx, "figure1", files, derived, labels);

    const Trajectory q_q = sample_analytic(quantum, cfg.dt, cfg.t_end, Method::quantum);
    const Trajectory q_b = sample_analytic(bohmian, cfg.dt, cfg.t_end, Method::bohmian);
    const DampedSineFit fit_q = fit_damped_sine(q_q);
    const DampedSineFit fit_b = fit_damped_sine(q_b);

    CommandResult result;
    result.metrics = derived;
    result.metrics.emplace_back("fit_frequency_quantum", fit_q.frequency);
    result.metrics.emplace_back("fit_frequency_bohmian", fit_b.frequency);
    result.metrics.emplace_back("fit_decay_quantum", fit_q.decay_rate);
    result.metrics.emplace_back("fit_decay_bohmian", fit_b.decay_rate);
    result.metrics.emplace_back("frequency_ratio", fit_b.frequency / fit_q.frequency);
    result.metrics.emplace_back("decay_ratio", fit_b.decay_rate / fit_q.decay_rate);

    if (wants_csv(ctx)) {
        result.outputs.push_back(emit(ctx, "figure1.csv", [&](std::ostream& o) {
            o << "t,q_quantum,q_bohmian\n";
            for (std::size_t k = 0; k < q_q.size(); ++k) {
                o << format_double(q_q.time(k)) << ',' << format_double(q_q.q[k]) << ','
                  << format_double(q_b.q[k]) << '\n';
            }
        }));
        result.outputs.push_back(emit(ctx, "figure1_report.csv",
                                      [&](std::ostream& o) { write_metrics_csv(o, result.metrics); }));
    }
    if (wants_svg(ctx)) {
        std::vector<PlotSeries> series(2);
        series[0] = {"quantum", "#1f77b4", {}, q_q.q};
        series[1] = {"bohmian", "#d62728", {}, q_b.q};
        for (std::size_t k = 0; k < q_q.size(); ++k) {
            series[0].t.push_back(q_q.time(k));
            series[1].t.push_back(q_b.time(k));
        }
        result.outputs.push_back(emit(ctx, "figure1.svg", [&](std::ostream& o) {
            write_svg_plot(o, series, "quantum vs Bohmian Langevin motion", "t", "q(t)");
        }));
    }
    say(ctx, "figure1 (" + std::string(to_string(rc.regime)) + ", xi mode " +
                 std::string(to_string(xi.mode)) + "):\n" + describe(result.metrics));
    return result;
}

}  // namespace qbath
