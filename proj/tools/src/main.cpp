#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ionheat/errors.hpp"
#include "ionheat/version.hpp"
#include "commands.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 numeric/fit failure,
// 4 I/O error.
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

void add_common(CLI::App* cmd, ionheat::cli::CommonOptions* opts) {
    cmd->add_option("--config", opts->config_path, "Configuration file")->required();
    cmd->add_option("--out", opts->out_dir, "Output directory (default: current)");
    cmd->add_option("--workers", opts->workers, "Worker threads; never affects results")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", opts->format, "Output format (csv)");
    auto* seed = cmd->add_option("--seed", opts->seed, "Override the configured master seed");
    seed->each([opts](const std::string&) { opts->seed_override = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trapped-ion motional heating simulator and analysis tool"};
    app.set_version_flag("--version", std::string("ionheat ") + ionheat::version_string);
    app.require_subcommand(1);

    ionheat::cli::CommonOptions ambient_opts, measure_opts, scan_opts, fit_opts;
    std::string fit_input;

    CLI::App* ambient = app.add_subcommand(
        "ambient-sim", "Level populations and nbar under a continuous ambient bath");
    add_common(ambient, &ambient_opts);

    CLI::App* measure = app.add_subcommand(
        "measure-sim", "Dark- and bright-state motional dynamics during qubit detection");
    add_common(measure, &measure_opts);

    CLI::App* scan = app.add_subcommand(
        "detuning-scan", "Long-time nbar curves across detection-beam detunings");
    add_common(scan, &scan_opts);

    CLI::App* fit = app.add_subcommand("fit", "Fit a model to a measured dataset");
    fit->require_subcommand(1);
    CLI::App* fit_bath = fit->add_subcommand("bath", "Heating rate from level populations");
    CLI::App* fit_thermal = fit->add_subcommand("thermal", "nbar from a few level populations");
    CLI::App* fit_carrier = fit->add_subcommand("carrier", "(rabi, nbar) from a carrier flop");
    CLI::App* fit_svd = fit->add_subcommand("svd", "Level populations from a sideband flop");
    for (CLI::App* sub : {fit_bath, fit_thermal, fit_carrier, fit_svd}) {
        add_common(sub, &fit_opts);
        sub->add_option("--input", fit_input, "Input dataset CSV")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (ambient->parsed()) ionheat::cli::run_ambient_sim(ambient_opts);
        else if (measure->parsed()) ionheat::cli::run_measure_sim(measure_opts);
        else if (scan->parsed()) ionheat::cli::run_detuning_scan(scan_opts);
        else if (fit_bath->parsed()) ionheat::cli::run_fit_bath(fit_opts, fit_input);
        else if (fit_thermal->parsed()) ionheat::cli::run_fit_thermal(fit_opts, fit_input);
        else if (fit_carrier->parsed()) ionheat::cli::run_fit_carrier(fit_opts, fit_input);
        else if (fit_svd->parsed()) ionheat::cli::run_fit_svd(fit_opts, fit_input);
    } catch (const ionheat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ionheat::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ionheat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
