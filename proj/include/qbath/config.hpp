#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbath/bath.hpp"

namespace qbath {

// Flat `key = value` document; `#` starts a comment.
class ConfigDocument {
public:
    static ConfigDocument parse(std::string_view text);
    static ConfigDocument load(const std::filesystem::path& path);

    bool contains(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    void set(std::string key, std::string value);
    const std::map<std::string, std::string, std::less<>>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string, std::less<>> values_;
};

enum class XiMode {
    automatic,  // dominant term in regime 1, full expression otherwise
    dominant,   // xi^2 = lambda' omega_c^4
    omega,      // xi^2 = omega0^2 + sum gamma^2 omega^2
    exact,      // xi^2 from the ground-state coefficients
};

std::string_view to_string(XiMode m) noexcept;
XiMode parse_xi_mode(std::string_view text);

// Which command a configuration is resolved for; selects defaults.
enum class CommandKind { bath, kernel, sample, simulate, compare, figure1 };

struct RunConfig {
    SystemParams system;
    BathSpec bath;
    double dt{1e-3};
    double t_end{10.0};
    double q0{1.0};
    double qdot0{0.0};
    std::size_t sample_count{100000};
    XiMode xi_mode{XiMode::automatic};

    // Resolved values as key/value text; parsing it back reproduces this config.
    std::map<std::string, std::string> echo() const;
    std::string echo_text() const;
};

const std::vector<std::string>& known_config_keys();

// Applies command defaults, then the document, then validates everything.
// Throws ConfigError (unknown key, unparsable value) or InvalidSpec.
RunConfig resolve_config(const ConfigDocument& doc, CommandKind kind,
                         std::optional<std::uint64_t> seed_override = std::nullopt);

std::string format_double(double value);

}  // namespace qbath
