#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qbath/config.hpp"
#include "qbath/errors.hpp"
#include "qbath/io.hpp"
#include "qbath/potentials.hpp"
#include "test_support.hpp"

using namespace qbath;

TEST_CASE("config parsing") {
    const ConfigDocument doc = ConfigDocument::parse(
        "# reference run\n"
        "omega0 = 1.0\n"
        "  n_modes=64   # trailing comment\n"
        "\n"
        "discretization = kernel_matched\n");
    CHECK(doc.get("omega0") == "1.0");
    CHECK(doc.get("n_modes") == "64");
    CHECK(doc.get("discretization") == "kernel_matched");
    CHECK_FALSE(doc.contains("omega_c"));

    CHECK_THROWS_WITH_AS(ConfigDocument::parse("omega_zero = 1\n"), doctest::Contains("omega_zero"), ConfigError);
    CHECK_THROWS_AS(ConfigDocument::parse("omega0 = 1\nomega0 = 2\n"), ConfigError);
    CHECK_THROWS_AS(ConfigDocument::parse("omega0 1\n"), ConfigError);
    CHECK_THROWS_AS(ConfigDocument::parse("omega0 =\n"), ConfigError);
    CHECK_THROWS_AS(ConfigDocument::load("/nonexistent/qbath.cfg"), ConfigError);
}

TEST_CASE("config resolution and defaults") {
    const RunConfig sim = resolve_config(ConfigDocument{}, CommandKind::simulate);
    CHECK(sim.bath.discretization == Discretization::kernel_matched);
    CHECK_FALSE(sim.bath.enforce_weak_coupling);
    CHECK(sim.bath.lambda_q_prime == 2.0 * sim.system.omega0 * sim.system.lambda_q);

    const RunConfig fig = resolve_config(ConfigDocument{}, CommandKind::figure1);
    CHECK(fig.bath.discretization == Discretization::paper_eq44);
    CHECK(fig.bath.enforce_weak_coupling);
    CHECK(fig.system.omega0 == 1.0);
    CHECK(fig.bath.omega_c == 1.5);

    ConfigDocument doc = ConfigDocument::parse("omega0 = 2\nlambda_q = 0.25\nseed = 5\n");
    const RunConfig r = resolve_config(doc, CommandKind::bath, 77);
    CHECK(r.bath.lambda_q_prime == doctest::Approx(1.0));
    CHECK(r.bath.seed == 77);
    CHECK(resolve_config(doc, CommandKind::bath).bath.seed == 5);

    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("n_modes = 0\n"), CommandKind::bath), InputError);
    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("hbar = -1\n"), CommandKind::bath), InputError);
    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("lambda_q = 1.5\n"), CommandKind::bath), InputError);
    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("omega_c = abc\n"), CommandKind::bath), ConfigError);
    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("n_modes = 2.5\n"), CommandKind::bath), ConfigError);
    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("discretization = lorentz\n"), CommandKind::bath),
                    ConfigError);
    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("sample_count = 50\n"), CommandKind::sample),
                    InputError);
    CHECK_THROWS_AS(resolve_config(ConfigDocument::parse("dt = 0\n"), CommandKind::simulate), InputError);
}

TEST_CASE("config echo reproduces the resolved config") {
    ConfigDocument doc = ConfigDocument::parse("omega0 = 1.3\nhbar = 0.05\nn_modes = 17\ndt = 0.002\n");
    const RunConfig a = resolve_config(doc, CommandKind::simulate);
    const RunConfig b = resolve_config(ConfigDocument::parse(a.echo_text()), CommandKind::simulate);
    CHECK(a.echo() == b.echo());
    CHECK(b.system.omega0 == 1.3);
    CHECK(b.dt == 0.002);
    for (const auto& [key, value] : a.echo()) {
        CHECK(std::find(known_config_keys().begin(), known_config_keys().end(), key) != known_config_keys().end());
    }
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("trajectory csv round trip is exact") {
    Trajectory t;
    t.dt = 1e-3;
    t.label = Method::gle;
    for (int k = 0; k < 50; ++k) {
        t.q.push_back(std::sin(0.1 * k) / 3.0);
        t.qdot.push_back(std::cos(0.1 * k) / 7.0);
    }
    std::stringstream ss;
    write_trajectory_csv(ss, t, 42);
    const std::string text = ss.str();
    CHECK(text.rfind("# method=gle dt=0.001 seed=42\nt,q,qdot\n", 0) == 0);
    const Trajectory back = read_trajectory_csv(ss);
    CHECK(back.q == t.q);
    CHECK(back.qdot == t.qdot);
    CHECK(back.dt == t.dt);
    CHECK(back.label == Method::gle);
}

TEST_CASE("bath csv round trip") {
    const auto [bath, params] = test::cubic_bath(12, 1.0, 1.5, 0.5);
    std::stringstream ss;
    write_bath_csv(ss, bath);
    const CsvTable table = read_csv(ss);
    REQUIRE(table.rows.size() == 12);
    const std::size_t w = table.column("omega"), g = table.column("gamma"), wt = table.column("weight");
    for (std::size_t a = 0; a < 12; ++a) {
        CHECK(table.number(a, w) == bath.omega[a]);
        CHECK(table.number(a, g) == bath.gamma[a]);
        CHECK(table.number(a, wt) == bath.weight(a));
    }
    CHECK_THROWS_AS(table.column("frequency"), InputError);
}

TEST_CASE("modes and samples csv") {
    const auto [bath, params] = test::cubic_bath(3, 1.0, 1.5, 0.5);
    const GroundState gs = build_ground_state(params, bath);
    std::stringstream ms;
    write_modes_csv(ms, gs);
    const CsvTable modes = read_csv(ms);
    CHECK(modes.header == std::vector<std::string>{"alpha", "theta", "omega_plus", "omega_minus"});
    CHECK(modes.number(2, 1) == gs.modes()[2].theta);

    const auto samples = sample_ground_state(gs, 1, 5);
    std::stringstream ss;
    write_samples_csv(ss, samples, true);
    const CsvTable tab = read_csv(ss);
    CHECK(tab.header.size() == 1 + 2 * 4);
    CHECK(tab.number(4, tab.column("x_3")) == samples[4].x[2]);
    CHECK(tab.number(4, tab.column("p_1")) == samples[4].p_bath[0]);
}

TEST_CASE("force scan csv round trip") {
    const auto [bath, params] = test::cubic_bath(4, 1.0, 1.5, 0.5);
    const GroundState gs = build_ground_state(params, bath);
    const std::vector<double> x = {0.1, 0.0, -0.1, 0.05};
    std::stringstream ss;
    write_force_scan_csv(ss, gs, bath, x, "sample0", -1.0, 1.0, 11);
    const CsvTable t = read_csv(ss);
    CHECK(t.header == std::vector<std::string>{"q", "x_slice_spec", "V", "Q", "force"});
    REQUIRE(t.rows.size() == 11);
    CHECK(t.rows[3][1] == "sample0");
    PhasePoint pt = PhasePoint::zeros(4);
    pt.x = x;
    pt.q = t.number(3, 0);
    CHECK(t.number(3, 2) == classical_potential(pt, gs.omega_sq(), bath));
    CHECK(t.number(3, 3) == quantum_potential(pt, gs));
    CHECK(t.number(3, 4) == bohmian_force(pt, gs, bath));
}

TEST_CASE("metrics csv and malformed input") {
    const std::vector<Metric> m = {{"relative_l2", 1e-4}, {"frequency_ratio", 2.25}};
    std::stringstream ss;
    write_metrics_csv(ss, m);
    const CsvTable t = read_csv(ss);
    CHECK(t.header == std::vector<std::string>{"metric", "value"});
    CHECK(t.rows[1][0] == "frequency_ratio");
    CHECK(t.number(1, 1) == 2.25);

    std::stringstream bad("t,q,qdot\n0,1\n");
    CHECK_THROWS_AS(read_csv(bad), InputError);
    std::stringstream nan_cell("t,q,qdot\n0,abc,1\n0.1,1,1\n");
    CHECK_THROWS_AS(read_trajectory_csv(nan_cell), InputError);
}

TEST_CASE("svg plot") {
    PlotSeries s{"quantum", "#1f77b4", {0.0, 1.0, 2.0}, {0.0, 1.0, 0.5}};
    std::stringstream ss;
    write_svg_plot(ss, std::span<const PlotSeries>(&s, 1), "title", "t", "q");
    const std::string svg = ss.str();
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("quantum") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
