#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "ionheat/bath.hpp"
#include "ionheat/fock.hpp"
#include "ionheat/qtt.hpp"
#include "ionheat/scattering.hpp"
#include "ionheat/thermometry.hpp"

namespace ionheat {

/// Probe stage of a synthetic experiment: the interrogation pulse swept over
/// a list of durations, with binomial shot noise (shots == 0 keeps the exact
/// probabilities).
struct ProbeParams {
    TransitionKind kind = TransitionKind::blue_sideband;
    double rabi = 0.0;  // rad/s
    double eta = 0.0;   // sideband probe coupling
    double eta_x = 0.0, eta_y = 0.0, ratio = 1.48;  // carrier probe couplings
    std::vector<double> durations;
    long shots = 0;
};

struct ExperimentSchedule {
    std::vector<double> delays;  // heating durations before each probe, s
    ProbeParams probe;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Ground truths the synthetic pipeline can evolve.
struct BathTruth {
    FockDistribution initial;
    double rate = 0.0;  // quanta/s
};
struct QttTruth {
    FockDistribution initial;
    std::vector<NoiseSource> sources;
    IonSpecies species;
    TrapConfig trap;
    int trajectories = 1000;
    int report_levels = 64;
    int workers = 1;
};
/// Closed-form detection-heating law; probing assumes the long-time thermal
/// shape at the predicted nbar.
struct DetectionHeatingTruth {
    ScatterModel model;
    TrapConfig trap;
    double nbar0 = 0.0;
};
using TruthModel = std::variant<BathTruth, QttTruth, DetectionHeatingTruth>;

/// Motional distribution of the truth model after a heating delay. QTT truths
/// use the trajectory-averaged distribution with a seed derived from
/// (schedule seed, delay index) by the callers below.
FockDistribution truth_state_at(const TruthModel& truth, double delay, std::uint64_t seed);

struct DelayedFlop {
    double delay = 0.0;
    FlopDataset data;
};

/// One flop record per heating delay: evolve, evaluate the probe forward
/// signal, draw binomial counts. Deterministic per schedule seed.
std::vector<DelayedFlop> generate_dataset(const TruthModel& truth,
                                          const ExperimentSchedule& schedule);

/// Directly sampled level populations (the bath-fit input format): for each
/// delay and level, counts ~ Binomial(shots, p_level). shots == 0 emits exact
/// populations with zero sigma.
PopulationDataset generate_population_dataset(const TruthModel& truth,
                                              std::span<const double> delays,
                                              std::span<const int> levels, long shots,
                                              std::uint64_t seed);

/// Brute-force fixed-step integrator of the diagonal high-temperature master
/// equation
///   d rho_n / dt = rate [ (n+1) rho_{n+1} + n rho_{n-1} - (2n+1) rho_n ],
/// the independent oracle for the analytic propagator. Throws NumericError
/// when boundary leakage exceeds leak_tol.
FockDistribution oracle_master_equation(const FockDistribution& initial, double rate, double t,
                                        int n_max = default_fock_truncation,
                                        double leak_tol = 1e-8);

}  // namespace ionheat
