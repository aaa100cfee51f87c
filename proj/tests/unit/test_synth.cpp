#include "doctest.h"

#include <cmath>
#include <vector>

#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"
#include "ionheat/synth.hpp"
#include "fixtures.hpp"

using namespace ionheat;
using namespace ionheat_test;
namespace kc = ionheat::constants;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / static_cast<double>(n - 1);
    return out;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("master-equation integrator: identity without drive") {
    const FockDistribution initial = thermal_distribution(0.7, 100);
    const FockDistribution out = oracle_master_equation(initial, 0.0, 1.0, 100);
    for (int n = 0; n <= 100; ++n) CHECK(out[n] == initial[n]);
}

TEST_CASE("master-equation integrator: ground state thermalizes") {
    const FockDistribution out = oracle_master_equation(fock_state(0, 200), 0.5, 1.0, 200);
    CHECK(out[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
    CHECK(out.mean() == doctest::Approx(0.5).epsilon(1e-7));
    const FockDistribution ref = thermal_distribution(0.5, 200);
    for (int n = 0; n <= 12; ++n) CHECK(out[n] == doctest::Approx(ref[n]).epsilon(1e-7));
}

TEST_CASE("master-equation integrator flags boundary leakage") {
    CHECK_THROWS_AS(oracle_master_equation(fock_state(0, 10), 3.0, 1.0, 10), NumericError);
    CHECK_THROWS_AS(oracle_master_equation(thermal_distribution(2.0, 200), 1.0, 1.0, 20),
                    DomainError);
}

TEST_CASE("analytic dataset reproduces the exact probe signal") {
    const FockDistribution truth = thermal_distribution(0.4, 200);
    ExperimentSchedule sched;
    sched.delays = {0.0, 1e-3};
    sched.probe.kind = TransitionKind::blue_sideband;
    sched.probe.rabi = kc::two_pi * 160e3;
    sched.probe.eta = 0.104;
    sched.probe.durations = linspace(0.0, 3e-4, 20);
    sched.probe.shots = 0;
    sched.seed = 5;

    const std::vector<DelayedFlop> ds = generate_dataset(BathTruth{truth, 500.0}, sched);
    REQUIRE(ds.size() == 2);
    for (const DelayedFlop& rec : ds) {
        const FockDistribution state = bath_propagate(truth, {500.0, rec.delay});
        for (const FlopPoint& p : rec.data.points) {
            CHECK(p.shots == 0);
            CHECK(p.counts ==
                  doctest::Approx(sideband_signal(state, sched.probe.rabi, sched.probe.eta, p.time))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("shot-sampled datasets are deterministic and in range") {
    ExperimentSchedule sched;
    sched.delays = {0.0, 2e-3};
    sched.probe.kind = TransitionKind::blue_sideband;
    sched.probe.rabi = kc::two_pi * 160e3;
    sched.probe.eta = 0.104;
    sched.probe.durations = linspace(0.0, 3e-4, 25);
    sched.probe.shots = 500;
    sched.seed = 99;

    const BathTruth truth{fock_state(0, 200), 770.0};
    const std::vector<DelayedFlop> a = generate_dataset(TruthModel{truth}, sched);
    const std::vector<DelayedFlop> b = generate_dataset(TruthModel{truth}, sched);
    for (std::size_t d = 0; d < a.size(); ++d) {
        for (std::size_t i = 0; i < a[d].data.points.size(); ++i) {
            CHECK(a[d].data.points[i].counts == b[d].data.points[i].counts);
            CHECK(a[d].data.points[i].counts >= 0.0);
            CHECK(a[d].data.points[i].counts <= 500.0);
        }
    }

    sched.seed = 100;
    const std::vector<DelayedFlop> c = generate_dataset(TruthModel{truth}, sched);
    bool any_different = false;
    for (std::size_t i = 0; i < a[0].data.points.size(); ++i)
        if (a[0].data.points[i].counts != c[0].data.points[i].counts) any_different = true;
    CHECK(any_different);
}

TEST_CASE("detection-heating truth probes the thermal state of the predicted nbar") {
    const ScatterModel m = ScatterModel::make(yb171(), detection_laser(-kc::two_pi * 11e6));
    const DetectionHeatingTruth truth{m, radial_trap(), 0.0};
    const double delay = 4e-4;
    const FockDistribution state = truth_state_at(TruthModel{truth}, delay, 1);
    const double nbar = nbar_of_t(m, radial_trap(), 0.0, delay);
    CHECK(state.mean() == doctest::Approx(nbar).epsilon(1e-9));
}

TEST_CASE("measurement-driven truth develops a super-thermal tail early on") {
    const FockDistribution initial =
        double_thermal_from_levels(0.90, 0.08, DoubleThermalConstraint::fix_hot_nbar(10.0), 150);
    QttTruth truth;
    truth.initial = initial;
    truth.sources = {NoiseSource{DiscreteNoise{ScatterModel::make(yb171(), detection_laser())}}};
    truth.species = yb171();
    truth.trap = radial_trap();
    truth.trajectories = 400;
    truth.report_levels = 8;
    truth.workers = 2;

    const std::vector<double> delays = {2e-5};
    const std::vector<int> levels = {0, 1, 2};
    const PopulationDataset data =
        generate_population_dataset(TruthModel{truth}, delays, levels, 0, 77);
    REQUIRE(data.samples.size() == 3);
    const double p0 = data.samples[0].value;
    const double p1 = data.samples[1].value;
    const double p2 = data.samples[2].value;
    // A thermal state has p2/p1 == p1/p0; the hot tail pushes the ratio up.
    CHECK(p2 / p1 > p1 / p0);
}

TEST_CASE("full pipeline round trip at the ambient rate") {
    const FockDistribution initial = fock_state(0, 200);
    const double truth_rate = 770.0;
    ExperimentSchedule sched;
    sched.delays = {0.0, 1e-3, 2e-3, 4e-3, 6e-3, 8e-3};
    sched.probe.kind = TransitionKind::blue_sideband;
    sched.probe.rabi = kc::two_pi * 160e3;
    sched.probe.eta = 0.104;
    sched.probe.durations = linspace(0.0, 3e-4, 60);
    sched.probe.shots = 500;
    sched.seed = 2718;

    const std::vector<DelayedFlop> ds =
        generate_dataset(BathTruth{initial, truth_rate}, sched);

    PopulationDataset populations;
    for (const DelayedFlop& rec : ds) {
        const PopulationEstimate est =
            svd_populations(rec.data, 8, sched.probe.rabi, sched.probe.eta, 60, 515 + static_cast<std::uint64_t>(rec.delay * 1e6));
        for (int level : {0, 1}) {
            const double sigma =
                std::max(0.5 * (est.hi[level] - est.lo[level]), 1e-3);
            populations.samples.push_back({rec.delay, level, est.median[level], sigma});
        }
    }
    const FitResult fit = fit_bath_rate(populations, initial);
    CHECK(fit.converged);
    CHECK(std::abs(fit.params[0] - truth_rate) / truth_rate < 0.15);
}

TEST_CASE("schedule validation") {
    ExperimentSchedule sched;
    CHECK_THROWS_AS(generate_dataset(BathTruth{fock_state(0, 10), 0.0}, sched), DomainError);
    const std::vector<double> delays = {0.0};
    const std::vector<int> levels;
    CHECK_THROWS_AS(
        generate_population_dataset(BathTruth{fock_state(0, 10), 0.0}, delays, levels, 10, 1),
        DomainError);
}

}  // TEST_SUITE
