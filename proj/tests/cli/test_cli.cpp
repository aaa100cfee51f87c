#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ionheat/bath.hpp"
#include "ionheat/constants.hpp"
#include "ionheat/fock.hpp"
#include "ionheat/io.hpp"
#include "ionheat/synth.hpp"
#include "ionheat/thermometry.hpp"

namespace fs = std::filesystem;
using namespace ionheat;

namespace {

const std::string cli = IONHEAT_CLI_PATH;
const std::string data_dir = IONHEAT_TEST_DATA_DIR;
const std::string config_dir = IONHEAT_CONFIG_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("ionheat_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string small_config() { return data_dir + std::string("/ambient_small.ini"); }

}  // namespace

TEST_CASE("ambient-sim output is byte-identical across reruns and worker counts") {
    TempDir a("det_a"), b("det_b"), c("det_c");
    REQUIRE(run_cli("ambient-sim --config " + small_config() + " --out " + a.path.string() +
                    " --workers 1") == 0);
    REQUIRE(run_cli("ambient-sim --config " + small_config() + " --out " + b.path.string() +
                    " --workers 2") == 0);
    REQUIRE(run_cli("ambient-sim --config " + small_config() + " --out " + c.path.string() +
                    " --workers 1") == 0);
    for (const char* name : {"populations.csv", "nbar.csv"}) {
        CHECK(slurp(a.file(name)) == slurp(b.file(name)));
        CHECK(slurp(a.file(name)) == slurp(c.file(name)));
    }
}

TEST_CASE("ambient-sim golden-file regression") {
    TempDir out("golden");
    REQUIRE(run_cli("ambient-sim --config " + small_config() + " --out " + out.path.string()) == 0);
    for (const char* name : {"populations.csv", "nbar.csv"}) {
        const std::string golden = data_dir + std::string("/golden/ambient_small/") + name;
        REQUIRE_MESSAGE(fs::exists(golden), "missing golden file ", golden);
        CHECK_MESSAGE(slurp(out.file(name)) == slurp(golden), "golden mismatch for ", name);
    }
}

TEST_CASE("seed override changes the sampled columns only") {
    TempDir a("seed_a"), b("seed_b");
    REQUIRE(run_cli("ambient-sim --config " + small_config() + " --out " + a.path.string()) == 0);
    REQUIRE(run_cli("ambient-sim --config " + small_config() + " --out " + b.path.string() +
                    " --seed 777") == 0);
    CHECK(slurp(a.file("nbar.csv")) != slurp(b.file("nbar.csv")));

    const CsvTable ta = read_csv(a.file("nbar.csv"));
    const CsvTable tb = read_csv(b.file("nbar.csv"));
    REQUIRE(ta.rows.size() == tb.rows.size());
    for (std::size_t i = 0; i < ta.rows.size(); ++i) {
        CHECK(ta.rows[i][0] == tb.rows[i][0]);  // same grid
        CHECK(ta.rows[i][1] == tb.rows[i][1]);  // same analytic bath column
    }
}

TEST_CASE("measure-sim with a dark bright ion matches the dark branch") {
    // Zero saturation switches the scattering off; the bright branch must
    // then reproduce the dark branch numbers exactly.
    TempDir out("meas");
    std::ofstream cfg(out.file("cfg.ini"));
    cfg << "[ion]\nmass = 170.936331 amu\nwavelength = 369.5 nm\nlinewidth = 19.6 MHz\n"
           "zeeman_splitting = 5.288 MHz\n"
           "[trap]\nfrequency = 1.09 MHz\neta_x = 0.104\neta_y = 0.112\nmode_ratio = 1.48\n"
           "[laser]\nsaturation = 0\ndetuning = 0 Hz\nabsorption_geometry = 0.25\n"
           "[initial]\nkind = ground\nlevels = 120\n"
           "[measure]\nambient_rate = 770\nt_max = 60 us\ngrid_points = 4\ntrajectories = 60\n"
           "report_levels = 2\n"
           "[run]\nseed = 5150\n";
    cfg.close();
    REQUIRE(run_cli("measure-sim --config " + out.file("cfg.ini") + " --out " +
                    out.path.string()) == 0);

    const CsvTable dark = read_csv(out.file("dark_populations.csv"));
    const CsvTable bright = read_csv(out.file("bright_populations.csv"));
    REQUIRE(dark.rows.size() == bright.rows.size());
    for (std::size_t i = 0; i < dark.rows.size(); ++i) {
        CHECK(dark.rows[i][0] == bright.rows[i][0]);  // time
        CHECK(dark.rows[i][1] == bright.rows[i][1]);  // level
        CHECK(dark.rows[i][3] == bright.rows[i][2]);  // qtt_p
        CHECK(dark.rows[i][4] == bright.rows[i][3]);  // qtt_p_se
    }
}

TEST_CASE("detuning-scan emits one block per detuning with the resonant one linear") {
    TempDir out("scan");
    std::ofstream cfg(out.file("cfg.ini"));
    cfg << "[ion]\nmass = 170.936331 amu\nwavelength = 369.5 nm\nlinewidth = 19.6 MHz\n"
           "zeeman_splitting = 5.288 MHz\n"
           "[trap]\nfrequency = 1.09 MHz\neta_x = 0.104\neta_y = 0.112\n"
           "[laser]\nsaturation = 1.27\ndetuning = 0 Hz\nabsorption_geometry = 0.25\n"
           "[scan]\ndetunings = 0 Hz\nt_max = 0.2 ms\ngrid_points = 5\nband = 0 Hz\n"
           "[run]\nseed = 1\n";
    cfg.close();
    REQUIRE(run_cli("detuning-scan --config " + out.file("cfg.ini") + " --out " +
                    out.path.string()) == 0);

    const CsvTable t = read_csv(out.file("detuning_scan.csv"));
    REQUIRE(t.rows.size() == 5);
    const double v1 = std::stod(t.rows[1][4]);
    const double v4 = std::stod(t.rows[4][4]);
    CHECK(v4 == doctest::Approx(4.0 * v1).epsilon(1e-9));  // linear on resonance
}

TEST_CASE("fit bath round trip through the CLI") {
    TempDir out("fitbath");
    const FockDistribution initial = fock_state(0, 200);
    const std::vector<double> delays = {0.0, 1e-3, 2e-3, 4e-3, 6e-3, 8e-3};
    const std::vector<int> levels = {0, 1};
    const PopulationDataset data =
        generate_population_dataset(BathTruth{initial, 770.0}, delays, levels, 500, 606);
    write_population_csv(out.file("data.csv"), data);

    REQUIRE(run_cli("fit bath --config " + config_dir + "/fit.ini --input " +
                    out.file("data.csv") + " --out " + out.path.string()) == 0);

    const CsvTable report = read_csv(out.file("fit_report.csv"));
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0][0] == "rate");
    const double rate = std::stod(report.rows[0][1]);
    const double sigma = std::stod(report.rows[0][2]);
    CHECK(std::abs(rate - 770.0) < 4.0 * sigma);
    CHECK(csv_metadata(report, "converged") == "1");
    CHECK(fs::exists(out.file("fit_residuals.csv")));
}

TEST_CASE("fit svd and fit thermal round trip through the CLI") {
    TempDir out("fitsvd");
    const FockDistribution truth =
        double_thermal_from_levels(0.90, 0.08, DoubleThermalConstraint::fix_hot_nbar(10.0), 100);
    ExperimentSchedule sched;
    sched.delays = {0.0};
    sched.probe.kind = TransitionKind::blue_sideband;
    sched.probe.rabi = constants::two_pi * 160e3;
    sched.probe.eta = 0.104;
    for (int i = 0; i < 60; ++i) sched.probe.durations.push_back(i * 3e-4 / 59.0);
    sched.probe.shots = 500;
    sched.seed = 17;
    const std::vector<DelayedFlop> ds = generate_dataset(BathTruth{truth, 0.0}, sched);
    write_flop_csv(out.file("flop.csv"), ds[0].data);

    REQUIRE(run_cli("fit svd --config " + config_dir + "/fit.ini --input " + out.file("flop.csv") +
                    " --out " + out.path.string()) == 0);
    const CsvTable pops = read_csv(out.file("populations.csv"));
    REQUIRE(pops.rows.size() == 8);
    CHECK(std::stod(pops.rows[0][1]) == doctest::Approx(0.90).epsilon(0.08));

    REQUIRE(run_cli("fit thermal --config " + config_dir + "/fit.ini --input " +
                    out.file("populations.csv") + " --out " + out.path.string()) == 0);
    const CsvTable report = read_csv(out.file("fit_report.csv"));
    CHECK(report.rows[0][0] == "nbar");
}

TEST_CASE("fit carrier round trip through the CLI") {
    TempDir out("fitcarrier");
    FlopDataset data;
    data.kind = TransitionKind::carrier;
    for (int i = 0; i < 60; ++i) {
        const double t = i * 4e-5 / 59.0;
        data.points.push_back(
            {t, carrier_signal_two_mode(4.0, 1.48, constants::two_pi * 150e3, 0.104, 0.112, t), 0});
    }
    write_flop_csv(out.file("carrier.csv"), data);

    REQUIRE(run_cli("fit carrier --config " + config_dir + "/fit.ini --input " +
                    out.file("carrier.csv") + " --out " + out.path.string()) == 0);
    const CsvTable report = read_csv(out.file("fit_report.csv"));
    REQUIRE(report.rows.size() == 2);
    CHECK(std::stod(report.rows[1][1]) == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("error paths exit with the documented codes") {
    TempDir out("errs");

    // Config problems -> 2.
    CHECK(run_cli("ambient-sim --out " + out.path.string()) == 2);  // missing --config
    std::ofstream bad(out.file("bad.ini"));
    bad << "[ion]\nmass = banana\n";
    bad.close();
    CHECK(run_cli("ambient-sim --config " + out.file("bad.ini") + " --out " + out.path.string()) ==
          2);
    CHECK(run_cli("ambient-sim --config " + small_config() + " --out " + out.path.string() +
                  " --format yaml") == 2);

    // Malformed or empty input -> 4.
    std::ofstream empty(out.file("empty.csv"));
    empty.close();
    CHECK(run_cli("fit bath --config " + config_dir + "/fit.ini --input " + out.file("empty.csv") +
                  " --out " + out.path.string()) == 4);
    CHECK(run_cli("fit bath --config " + config_dir + "/fit.ini --input " +
                  out.file("nosuch.csv") + " --out " + out.path.string()) == 4);

    // Fit failures -> 3.
    PopulationDataset flat;
    flat.add_counts(1e-3, 0, 400, 500);
    flat.add_counts(1e-3, 1, 50, 500);
    write_population_csv(out.file("flat.csv"), flat);
    CHECK(run_cli("fit bath --config " + config_dir + "/fit.ini --input " + out.file("flat.csv") +
                  " --out " + out.path.string()) == 3);
}
