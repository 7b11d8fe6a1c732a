#include "qbath/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qbath/errors.hpp"

namespace qbath {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                          "' is not a finite number");
    }
    return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    std::uint64_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                          "' is not a non-negative integer");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError("key '" + std::string(key) + "': expected true or false");
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text) {
    ConfigDocument doc;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        }
        const auto& known = known_config_keys();
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        if (doc.contains(key)) throw ConfigError("duplicate config key '" + key + "'");
        doc.values_.emplace(key, value);
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool ConfigDocument::contains(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> ConfigDocument::get(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void ConfigDocument::set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

std::string_view to_string(XiMode m) noexcept {
    switch (m) {
        case XiMode::automatic: return "auto";
        case XiMode::dominant: return "dominant";
        case XiMode::omega: return "omega";
        case XiMode::exact: return "exact";
    }
    return "unknown";
}

XiMode parse_xi_mode(std::string_view text) {
    for (XiMode m : {XiMode::automatic, XiMode::dominant, XiMode::omega, XiMode::exact}) {
        if (to_string(m) == text) return m;
    }
    throw ConfigError("unknown xi_mode '" + std::string(text) + "'");
}

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "omega0", "hbar",   "lambda_q", "lambda_b", "n_modes", "omega_c",
        "lambda_q_prime", "discretization", "seed", "dt", "t_end", "q0",
        "qdot0", "sample_count", "enforce_weak_coupling", "xi_mode"};
    return keys;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::map<std::string, std::string> RunConfig::echo() const {
    return {
        {"omega0", format_double(system.omega0)},
        {"hbar", format_double(system.hbar)},
        {"lambda_q", format_double(system.lambda_q)},
        {"lambda_b", format_double(system.lambda_b)},
        {"n_modes", std::to_string(bath.n_modes)},
        {"omega_c", format_double(bath.omega_c)},
        {"lambda_q_prime", format_double(bath.lambda_q_prime)},
        {"discretization", std::string(to_string(bath.discretization))},
        {"seed", std::to_string(bath.seed)},
        {"dt", format_double(dt)},
        {"t_end", format_double(t_end)},
        {"q0", format_double(q0)},
        {"qdot0", format_double(qdot0)},
        {"sample_count", std::to_string(sample_count)},
        {"enforce_weak_coupling", bath.enforce_weak_coupling ? "true" : "false"},
        {"xi_mode", std::string(to_string(xi_mode))},
    };
}

std::string RunConfig::echo_text() const {
    std::string out;
    for (const auto& [k, v] : echo()) out += k + " = " + v + "\n";
    return out;
}

RunConfig resolve_config(const ConfigDocument& doc, CommandKind kind,
                         std::optional<std::uint64_t> seed_override) {
    for (const auto& [key, value] : doc.values()) {
        const auto& known = known_config_keys();
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    RunConfig cfg;
    const bool dynamics_default = kind == CommandKind::simulate || kind == CommandKind::kernel;
    cfg.bath.discretization =
        dynamics_default ? Discretization::kernel_matched : Discretization::paper_eq44;

    auto number = [&](std::string_view key, double& target) {
        if (auto v = doc.get(key)) target = parse_double(key, *v);
    };
    number("omega0", cfg.system.omega0);
    number("hbar", cfg.system.hbar);
    number("lambda_q", cfg.system.lambda_q);
    number("lambda_b", cfg.system.lambda_b);
    number("omega_c", cfg.bath.omega_c);
    number("dt", cfg.dt);
    number("t_end", cfg.t_end);
    number("q0", cfg.q0);
    number("qdot0", cfg.qdot0);
    if (auto v = doc.get("n_modes")) cfg.bath.n_modes = parse_unsigned("n_modes", *v);
    if (auto v = doc.get("seed")) cfg.bath.seed = parse_unsigned("seed", *v);
    if (auto v = doc.get("sample_count")) cfg.sample_count = parse_unsigned("sample_count", *v);
    if (auto v = doc.get("discretization")) {
        try {
            cfg.bath.discretization = parse_discretization(*v);
        } catch (const InvalidSpec& e) {
            throw ConfigError(e.what());
        }
    }
    if (auto v = doc.get("xi_mode")) cfg.xi_mode = parse_xi_mode(*v);
    if (seed_override) cfg.bath.seed = *seed_override;

    cfg.bath.lambda_q_prime = cfg.system.markov_strength();
    number("lambda_q_prime", cfg.bath.lambda_q_prime);

    cfg.bath.enforce_weak_coupling = cfg.bath.discretization == Discretization::paper_eq44;
    if (auto v = doc.get("enforce_weak_coupling")) {
        cfg.bath.enforce_weak_coupling = parse_bool("enforce_weak_coupling", *v);
    }

    cfg.system.validate();
    cfg.bath.validate();
    if (!(cfg.dt > 0.0)) throw InvalidSpec("dt must be positive");
    if (!(cfg.t_end > 0.0)) throw InvalidSpec("t_end must be positive");
    if (cfg.t_end / cfg.dt < 2.0) throw InvalidSpec("t_end must cover at least two steps");
    if (kind == CommandKind::sample && cfg.sample_count < 100) {
        throw InvalidSpec("sample_count must be at least 100");
    }
    return cfg;
}

}  // namespace qbath
