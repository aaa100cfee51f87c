#pragma once

#include <cstdint>
#include <string>

namespace ionheat::cli {

/// Options shared by every subcommand.
struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    int workers = 1;
    std::string format = "csv";
    bool seed_override = false;
    std::uint64_t seed = 0;
};

void run_ambient_sim(const CommonOptions& opts);
void run_measure_sim(const CommonOptions& opts);
void run_detuning_scan(const CommonOptions& opts);

void run_fit_bath(const CommonOptions& opts, const std::string& input);
void run_fit_thermal(const CommonOptions& opts, const std::string& input);
void run_fit_carrier(const CommonOptions& opts, const std::string& input);
void run_fit_svd(const CommonOptions& opts, const std::string& input);

}  // namespace ionheat::cli
