// qbath: dissipative oscillator-bath simulations from the command line.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbath/commands.hpp"
#include "qbath/errors.hpp"

namespace {

struct Options {
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::string format = "both";
    std::string methods;
    std::string a, b;
    bool quiet = false;
    bool plain = false;
};

qbath::CommandKind kind_of(const std::string& name) {
    using qbath::CommandKind;
    if (name == "bath") return CommandKind::bath;
    if (name == "kernel") return CommandKind::kernel;
    if (name == "sample") return CommandKind::sample;
    if (name == "simulate") return CommandKind::simulate;
    if (name == "compare") return CommandKind::compare;
    return CommandKind::figure1;
}

std::vector<qbath::Method> parse_methods(const std::string& text) {
    std::vector<qbath::Method> out;
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(qbath::parse_method(item));
        } catch (const qbath::InvalidSpec& e) {
            throw qbath::ConfigError(e.what());
        }
    }
    return out;
}

int run(const std::string& command, const Options& opt) {
    const qbath::ConfigDocument doc =
        opt.config.empty() ? qbath::ConfigDocument{} : qbath::ConfigDocument::load(opt.config);
    const qbath::RunConfig cfg = qbath::resolve_config(doc, kind_of(command), opt.seed);

    qbath::CommandContext ctx;
    ctx.out_dir = opt.out_dir;
    ctx.format = qbath::parse_output_format(opt.format);
    ctx.methods = parse_methods(opt.methods);
    ctx.compare_a = opt.a;
    ctx.compare_b = opt.b;
    ctx.log = opt.quiet ? nullptr : &std::cout;

    qbath::CommandResult result;
    if (command == "bath") result = qbath::cmd_bath(cfg, ctx);
    else if (command == "kernel") result = qbath::cmd_kernel(cfg, ctx);
    else if (command == "sample") result = qbath::cmd_sample(cfg, ctx);
    else if (command == "simulate") result = qbath::cmd_simulate(cfg, ctx);
    else if (command == "compare") result = qbath::cmd_compare(cfg, ctx);
    else result = qbath::cmd_figure1(cfg, ctx);
    return result.passed ? qbath::kExitOk : qbath::kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oscillator coupled to a harmonic bath: quantum and Bohmian Langevin dynamics"};
    app.require_subcommand(1);
    Options opt;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"bath", "discretize the Ohmic bath and write the mode tables"},
        {"kernel", "tabulate the discrete and continuum memory kernels"},
        {"sample", "sample the ground state and check its statistics"},
        {"simulate", "integrate the dynamics with the selected methods"},
        {"compare", "compare two trajectory CSV files"},
        {"figure1", "overlay the quantum and Bohmian damped solutions"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "key = value configuration file");
        sub->add_option("--out-dir", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "RNG seed (overrides the config)");
        sub->add_option("--format", opt.format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
        sub->add_flag("--quiet", opt.quiet, "suppress the text summary");
        sub->add_flag("--plain", opt.plain, "plain log output (no color)");
        if (name == "simulate") {
            sub->add_option("--methods", opt.methods, "comma list of full,gle,markov_quantum,bohmian")
                ->required();
        }
        if (name == "compare") {
            sub->add_option("--a", opt.a, "reference trajectory CSV")->required();
            sub->add_option("--b", opt.b, "second trajectory CSV")->required();
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? qbath::kExitOk : qbath::kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const qbath::InputError& e) {
        std::cerr << "qbath " << command << ": invalid input: " << e.what() << '\n';
        return qbath::kExitConfig;
    } catch (const qbath::NumericError& e) {
        std::cerr << "qbath " << command << ": numeric failure: " << e.what() << '\n';
        return qbath::kExitNumeric;
    } catch (const qbath::IoError& e) {
        std::cerr << "qbath " << command << ": " << e.what() << '\n';
        return qbath::kExitIo;
    }
}
