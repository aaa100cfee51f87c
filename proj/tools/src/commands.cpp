#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <vector>

#include "ionheat/bath.hpp"
#include "ionheat/config.hpp"
#include "ionheat/errors.hpp"
#include "ionheat/io.hpp"
#include "ionheat/qtt.hpp"
#include "ionheat/scattering.hpp"
#include "ionheat/synth.hpp"
#include "ionheat/thermometry.hpp"
#include "ionheat/version.hpp"

namespace ionheat::cli {

namespace {

namespace fs = std::filesystem;
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Context {
    RunConfig rc;
    CommonOptions opts;

    std::uint64_t seed() const { return opts.seed_override ? opts.seed : rc.seed; }

    Metadata metadata(const std::string& command) const {
        char hash[20];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(rc.raw.hash()));
        return {{"tool", std::string("ionheat ") + version_string},
                {"command", command},
                {"config_hash", hash},
                {"seed", std::to_string(seed())}};
    }

    std::string out(const std::string& name) const {
        return (fs::path(opts.out_dir) / name).string();
    }
};

Context make_context(const CommonOptions& opts) {
    if (opts.format != "csv")
        throw ConfigError("unsupported output format '" + opts.format + "' (only csv)");
    Context ctx{load_run_config(opts.config_path), opts};
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + opts.out_dir + ": " + ec.message());
    return ctx;
}

std::vector<double> linspace(double lo, double hi, long n) {
    if (n < 2) throw ConfigError("grid needs at least 2 points");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

void write_fit_report(const Context& ctx, const std::string& command, const FitResult& fit,
                      const std::string& unit_hint) {
    CsvTable t;
    t.metadata = ctx.metadata(command);
    t.metadata.emplace_back("schema", "fit-report");
    t.metadata.emplace_back("objective", format_double(fit.objective));
    t.metadata.emplace_back("converged", fit.converged ? "1" : "0");
    t.metadata.emplace_back("evaluations", std::to_string(fit.evaluations));
    t.metadata.emplace_back("message", fit.message);
    t.header = {"parameter", "value", "sigma"};
    for (std::size_t i = 0; i < fit.params.size(); ++i)
        t.rows.push_back({fit.param_names[i], format_double(fit.params[i]),
                          format_double(fit.sigmas[i])});
    write_csv(ctx.out("fit_report.csv"), t);

    for (std::size_t i = 0; i < fit.params.size(); ++i)
        std::cout << fit.param_names[i] << " = " << format_double(fit.params[i]) << " +/- "
                  << format_double(fit.sigmas[i]) << (i == 0 ? " " + unit_hint : "") << "\n";
    std::cout << "objective " << format_double(fit.objective) << ", "
              << (fit.converged ? "converged" : "NOT converged") << ", " << fit.evaluations
              << " evaluations\n";
}

}  // namespace

void run_ambient_sim(const CommonOptions& opts) {
    const Context ctx = make_context(opts);
    const Config& cfg = ctx.rc.raw;
    const double rate = cfg.number_or("ambient", "rate", 770.0);
    const double t_max = cfg.time_s_or("ambient", "t_max", 8e-3);
    const long grid_points = cfg.integer_or("ambient", "grid_points", 17);
    const long trajectories = cfg.integer_or("ambient", "trajectories", 1000);
    const double step = cfg.time_s_or("ambient", "step", 1e-6);
    const int levels = static_cast<int>(cfg.integer_or("ambient", "report_levels", 2));

    const FockDistribution initial = initial_state_from_config(cfg);
    const std::vector<double> grid = linspace(0.0, t_max, grid_points);

    const std::vector<NoiseSource> sources = {NoiseSource{ContinuousNoise{
        spectral_density_for_rate(rate, ctx.rc.species, ctx.rc.trap), step}}};
    EnsembleOptions eopt;
    eopt.report_levels = levels;
    eopt.workers = opts.workers;
    const EnsembleResult ens = ensemble_average(initial, sources, ctx.rc.species, ctx.rc.trap,
                                                grid, static_cast<int>(trajectories), ctx.seed(), eopt);

    CsvTable pops;
    pops.metadata = ctx.metadata("ambient-sim");
    pops.metadata.emplace_back("schema", "model-populations");
    pops.header = {"time_s", "level", "bath_p", "qtt_p", "qtt_p_se"};
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
        for (int level = 0; level < levels; ++level) {
            pops.rows.push_back({format_double(grid[ti]), std::to_string(level),
                                 format_double(bath_level_prob(initial, {rate, grid[ti]}, level)),
                                 format_double(ens.populations[ti][static_cast<std::size_t>(level)]),
                                 format_double(ens.population_se[ti][static_cast<std::size_t>(level)])});
        }
    }
    write_csv(ctx.out("populations.csv"), pops);

    CsvTable nbar;
    nbar.metadata = ctx.metadata("ambient-sim");
    nbar.metadata.emplace_back("schema", "model-nbar");
    nbar.header = {"time_s", "bath_nbar", "qtt_nbar", "qtt_nbar_se"};
    for (std::size_t ti = 0; ti < grid.size(); ++ti)
        nbar.rows.push_back({format_double(grid[ti]),
                             format_double(bath_nbar(initial, {rate, grid[ti]})),
                             format_double(ens.nbar[ti]), format_double(ens.nbar_se[ti])});
    write_csv(ctx.out("nbar.csv"), nbar);

    std::cout << "ambient-sim: " << trajectories << " trajectories at " << format_double(rate)
              << " quanta/s, wrote populations.csv and nbar.csv\n";
}

void run_measure_sim(const CommonOptions& opts) {
    const Context ctx = make_context(opts);
    const Config& cfg = ctx.rc.raw;
    const double ambient_rate = cfg.number_or("measure", "ambient_rate", 770.0);
    const double t_max = cfg.time_s_or("measure", "t_max", 100e-6);
    const long grid_points = cfg.integer_or("measure", "grid_points", 11);
    const long trajectories = cfg.integer_or("measure", "trajectories", 1000);
    const double step = cfg.time_s_or("measure", "step", 1e-6);
    const int levels = static_cast<int>(cfg.integer_or("measure", "report_levels", 3));
    const bool include_ambient = cfg.flag_or("measure", "include_ambient", true);

    const FockDistribution initial = initial_state_from_config(cfg);
    const std::vector<double> grid = linspace(0.0, t_max, grid_points);
    const double spectral =
        spectral_density_for_rate(ambient_rate, ctx.rc.species, ctx.rc.trap);

    EnsembleOptions eopt;
    eopt.report_levels = levels;
    eopt.workers = opts.workers;

    // Dark state: no photon scattering, the ambient bath only.
    const std::vector<NoiseSource> dark_sources = {NoiseSource{ContinuousNoise{spectral, step}}};
    const EnsembleResult dark = ensemble_average(initial, dark_sources, ctx.rc.species, ctx.rc.trap,
                                                 grid, static_cast<int>(trajectories), ctx.seed(), eopt);

    CsvTable dark_csv;
    dark_csv.metadata = ctx.metadata("measure-sim");
    dark_csv.metadata.emplace_back("schema", "model-populations");
    dark_csv.metadata.emplace_back("branch", "dark");
    dark_csv.header = {"time_s", "level", "bath_p", "qtt_p", "qtt_p_se"};
    for (std::size_t ti = 0; ti < grid.size(); ++ti)
        for (int level = 0; level < levels; ++level)
            dark_csv.rows.push_back(
                {format_double(grid[ti]), std::to_string(level),
                 format_double(bath_level_prob(initial, {ambient_rate, grid[ti]}, level)),
                 format_double(dark.populations[ti][static_cast<std::size_t>(level)]),
                 format_double(dark.population_se[ti][static_cast<std::size_t>(level)])});
    write_csv(ctx.out("dark_populations.csv"), dark_csv);

    // Bright state: photon recoil kicks, plus the ambient bath unless disabled.
    const ScatterModel scatter = ScatterModel::make(ctx.rc.species, ctx.rc.laser);
    std::vector<NoiseSource> bright_sources = {NoiseSource{DiscreteNoise{scatter}}};
    if (include_ambient && ambient_rate > 0.0)
        bright_sources.push_back(NoiseSource{ContinuousNoise{spectral, step}});
    const EnsembleResult bright =
        ensemble_average(initial, bright_sources, ctx.rc.species, ctx.rc.trap, grid,
                         static_cast<int>(trajectories), ctx.seed(), eopt);

    CsvTable bright_csv;
    bright_csv.metadata = ctx.metadata("measure-sim");
    bright_csv.metadata.emplace_back("schema", "qtt-populations");
    bright_csv.metadata.emplace_back("branch", "bright");
    bright_csv.header = {"time_s", "level", "qtt_p", "qtt_p_se"};
    for (std::size_t ti = 0; ti < grid.size(); ++ti)
        for (int level = 0; level < levels; ++level)
            bright_csv.rows.push_back(
                {format_double(grid[ti]), std::to_string(level),
                 format_double(bright.populations[ti][static_cast<std::size_t>(level)]),
                 format_double(bright.population_se[ti][static_cast<std::size_t>(level)])});
    write_csv(ctx.out("bright_populations.csv"), bright_csv);

    // nbar with the thermal-model comparison of the lowest three levels.
    CsvTable nbar_csv;
    nbar_csv.metadata = ctx.metadata("measure-sim");
    nbar_csv.metadata.emplace_back("schema", "qtt-nbar-thermal");
    nbar_csv.header = {"time_s", "qtt_nbar", "qtt_nbar_se", "thermal_fit_nbar",
                       "thermal_fit_nbar_se"};
    for (std::size_t ti = 0; ti < grid.size(); ++ti) {
        std::vector<LevelObservation> obs;
        for (int level = 0; level < std::min(levels, 3); ++level)
            obs.push_back({level, bright.populations[ti][static_cast<std::size_t>(level)],
                           std::max(bright.population_se[ti][static_cast<std::size_t>(level)], 1e-6)});
        const FitResult fit = fit_thermal_from_levels(obs);
        nbar_csv.rows.push_back({format_double(grid[ti]), format_double(bright.nbar[ti]),
                                 format_double(bright.nbar_se[ti]), format_double(fit.params[0]),
                                 format_double(fit.sigmas[0])});
    }
    write_csv(ctx.out("bright_nbar.csv"), nbar_csv);

    std::cout << "measure-sim: dark and bright branches over " << format_double(t_max)
              << " s, wrote dark_populations.csv, bright_populations.csv, bright_nbar.csv\n";
}

void run_detuning_scan(const CommonOptions& opts) {
    const Context ctx = make_context(opts);
    const Config& cfg = ctx.rc.raw;

    std::vector<double> detunings;
    if (cfg.has("scan", "detunings")) {
        detunings = cfg.frequency_list("scan", "detunings");
    } else {
        detunings = {-constants::two_pi * 11e6, -constants::two_pi * 1e6, constants::two_pi * 9e6};
    }
    std::vector<double> saturations(detunings.size(), 0.0);
    if (cfg.has("scan", "saturations")) {
        saturations = cfg.number_list("scan", "saturations");
        if (saturations.size() != detunings.size())
            throw ConfigError("[scan] saturations must match detunings in length");
    }
    const double t_max = cfg.time_s_or("scan", "t_max", 1.5e-3);
    const long grid_points = cfg.integer_or("scan", "grid_points", 31);
    const double nbar0 = cfg.number_or("scan", "nbar0", 0.0);

    DetuningScanOptions sopt;
    sopt.band_halfwidth = cfg.frequency_or("scan", "band", constants::two_pi * 2e6);
    sopt.nbar_ceiling = cfg.number_or("scan", "nbar_ceiling", 400.0);

    std::vector<DetuningScanPoint> points;
    for (std::size_t i = 0; i < detunings.size(); ++i)
        points.push_back({detunings[i], saturations[i]});
    const std::vector<double> grid = linspace(0.0, t_max, grid_points);

    const std::vector<ScanCurve> curves =
        detuning_scan(ctx.rc.species, ctx.rc.laser, points, ctx.rc.trap, nbar0, grid, sopt);

    CsvTable t;
    t.metadata = ctx.metadata("detuning-scan");
    t.metadata.emplace_back("schema", "detuning-scan");
    t.header = {"detuning_rad_s", "gamma_per_s", "time_s", "gamma_t",
                "nbar", "nbar_lo", "nbar_hi", "ceiling_exceeded", "doppler_warning"};
    for (const ScanCurve& c : curves) {
        for (std::size_t i = 0; i < c.curve.times.size(); ++i) {
            t.rows.push_back({format_double(c.detuning), format_double(c.scatter_rate),
                              format_double(c.curve.times[i]), format_double(c.gamma_t[i]),
                              format_double(c.curve.values[i]), format_double(c.curve.ci_low[i]),
                              format_double(c.curve.ci_high[i]), c.ceiling_exceeded ? "1" : "0",
                              c.doppler_warning ? "1" : "0"});
        }
    }
    write_csv(ctx.out("detuning_scan.csv"), t);
    std::cout << "detuning-scan: " << curves.size() << " detunings, wrote detuning_scan.csv\n";
}

void run_fit_bath(const CommonOptions& opts, const std::string& input) {
    const Context ctx = make_context(opts);
    const Config& cfg = ctx.rc.raw;
    const PopulationDataset data = read_population_csv(input);
    const FockDistribution initial = initial_state_from_config(cfg);

    BathFitOptions fopt;
    fopt.weighted = cfg.flag_or("fit", "weighted", true);
    fopt.rate_upper = cfg.number_or("fit", "rate_upper", 0.0);
    fopt.rel_tol = cfg.number_or("fit", "rel_tol", 1e-4);
    const FitResult fit = fit_bath_rate(data, initial, fopt);
    write_fit_report(ctx, "fit bath", fit, "quanta/s");

    CsvTable res;
    res.metadata = ctx.metadata("fit bath");
    res.metadata.emplace_back("schema", "fit-residuals");
    res.header = {"time_s", "level", "measured", "model", "residual"};
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const PopulationSample& s = data.samples[i];
        res.rows.push_back({format_double(s.time), std::to_string(s.level),
                            format_double(s.value), format_double(s.value - fit.residuals[i]),
                            format_double(fit.residuals[i])});
    }
    write_csv(ctx.out("fit_residuals.csv"), res);
}

void run_fit_thermal(const CommonOptions& opts, const std::string& input) {
    const Context ctx = make_context(opts);
    const std::vector<LevelObservation> obs = read_levels_csv(input);
    const FitResult fit = fit_thermal_from_levels(obs);
    write_fit_report(ctx, "fit thermal", fit, "quanta");

    CsvTable res;
    res.metadata = ctx.metadata("fit thermal");
    res.metadata.emplace_back("schema", "fit-residuals");
    res.header = {"level", "measured", "model", "residual"};
    for (std::size_t i = 0; i < obs.size(); ++i)
        res.rows.push_back({std::to_string(obs[i].level), format_double(obs[i].value),
                            format_double(obs[i].value - fit.residuals[i]),
                            format_double(fit.residuals[i])});
    write_csv(ctx.out("fit_residuals.csv"), res);
}

void run_fit_carrier(const CommonOptions& opts, const std::string& input) {
    const Context ctx = make_context(opts);
    const Config& cfg = ctx.rc.raw;
    const FlopDataset data = read_flop_csv(input);

    CarrierFitOptions fopt;
    fopt.n_max = static_cast<int>(cfg.integer_or("fit", "n_max", 4000));
    fopt.tail_tol = cfg.number_or("fit", "tail_tol", 1e-6);
    fopt.rel_tol = cfg.number_or("fit", "rel_tol", 1e-6);
    const double ratio = ctx.rc.trap.mode_frequency_ratio;
    const FitResult fit =
        fit_carrier_nbar(data, ctx.rc.trap.lamb_dicke_x, ctx.rc.trap.lamb_dicke_y, ratio, fopt);
    write_fit_report(ctx, "fit carrier", fit, "rad/s");

    CsvTable res;
    res.metadata = ctx.metadata("fit carrier");
    res.metadata.emplace_back("schema", "fit-residuals");
    res.header = {"time_s", "measured", "model", "residual"};
    FlopDataset sorted = data;
    sorted.canonicalize();
    for (std::size_t i = 0; i < sorted.points.size(); ++i) {
        const double y = FlopDataset::probability(sorted.points[i]);
        res.rows.push_back({format_double(sorted.points[i].time), format_double(y),
                            format_double(y - fit.residuals[i]),
                            format_double(fit.residuals[i])});
    }
    write_csv(ctx.out("fit_residuals.csv"), res);
}

void run_fit_svd(const CommonOptions& opts, const std::string& input) {
    const Context ctx = make_context(opts);
    const Config& cfg = ctx.rc.raw;
    const FlopDataset data = read_flop_csv(input);

    double rabi = cfg.frequency_or("probe", "rabi", 0.0);
    if (rabi <= 0.0) rabi = data.rabi_prior;
    if (rabi <= 0.0)
        throw ConfigError("fit svd needs [probe] rabi or a rabi_prior in the dataset");
    const double eta = cfg.number_or("probe", "eta", ctx.rc.trap.lamb_dicke_x);
    const int levels = static_cast<int>(cfg.integer_or("svd", "levels", 8));
    const int bootstrap = static_cast<int>(cfg.integer_or("svd", "bootstrap", 200));

    SvdOptions sopt;
    sopt.singular_threshold = cfg.number_or("svd", "singular_threshold", 1e-8);
    sopt.workers = opts.workers;
    const PopulationEstimate est =
        svd_populations(data, levels, rabi, eta, bootstrap, ctx.seed(), sopt);

    Metadata meta = ctx.metadata("fit svd");
    meta.emplace_back("residual_norm", format_double(est.residual_norm));
    meta.emplace_back("lamb_dicke_warning", est.lamb_dicke_warning ? "1" : "0");
    write_levels_csv(ctx.out("populations.csv"), est, meta);

    std::cout << "fit svd: " << levels << " levels, residual norm "
              << format_double(est.residual_norm) << ", wrote populations.csv\n";
}

}  // namespace ionheat::cli
