#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qbath/analysis.hpp"
#include "qbath/config.hpp"
#include "qbath/dynamics.hpp"
#include "qbath/io.hpp"

namespace qbath {

inline constexpr const char* kToolVersion = "0.1.0";

enum class OutputFormat { csv, svg, both };
OutputFormat parse_output_format(std::string_view text);

struct CommandContext {
    std::filesystem::path out_dir{"."};
    OutputFormat format{OutputFormat::both};
    std::vector<Method> methods;  // simulate
    std::filesystem::path compare_a, compare_b;  // compare
    std::ostream* log{nullptr};
    // Stamp the manifest with wall-clock time (tests turn this off).
    bool timestamp{true};
};

struct CommandResult {
    std::vector<Metric> metrics;
    std::vector<std::filesystem::path> outputs;
    bool passed{true};  // false when a built-in check failed
};

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

struct XiChoice {
    double xi{0.0};
    XiMode mode{XiMode::exact};  // mode actually used
    double xi_exact{0.0};
    double xi_dominant{0.0};
    double xi_omega{0.0};
};

// Bohmian frequency under the configured approximation. `automatic` follows
// the regime: dominant-term value in regime 1, exact coefficients otherwise.
XiChoice choose_xi(const RunConfig& cfg, const BathRealization& bath);

CommandResult cmd_bath(const RunConfig& cfg, const CommandContext& ctx);
CommandResult cmd_kernel(const RunConfig& cfg, const CommandContext& ctx);
CommandResult cmd_sample(const RunConfig& cfg, const CommandContext& ctx);
CommandResult cmd_simulate(const RunConfig& cfg, const CommandContext& ctx);
CommandResult cmd_compare(const RunConfig& cfg, const CommandContext& ctx);
CommandResult cmd_figure1(const RunConfig& cfg, const CommandContext& ctx);

}  // namespace qbath
