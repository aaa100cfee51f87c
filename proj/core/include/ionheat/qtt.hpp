#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "ionheat/fock.hpp"
#include "ionheat/params.hpp"
#include "ionheat/rng.hpp"
#include "ionheat/scattering.hpp"

namespace ionheat {

/// Continuous electric-field noise described by its single-sided spectral
/// density at the trap frequency, applied as one Gaussian phase-space kick
/// per fixed step. The step must be long against the field correlation time
/// (documented contract) and small enough that the mean squared kick stays
/// below kick_smallness_limit; runs refuse configurations violating that.
struct ContinuousNoise {
    double spectral_density = 0.0;  // S_E(omega), V^2 m^-2 Hz^-1
    double step = 1e-6;             // s
};

/// Discrete photon-scattering noise: recoil kicks at Poisson-distributed
/// event times with rate Gamma_0.
struct DiscreteNoise {
    ScatterModel model;
};

using NoiseSource = std::variant<ContinuousNoise, DiscreteNoise>;

inline constexpr double kick_smallness_limit = 0.01;  // on <|alpha_k|^2> per step

/// Heating rate implied by a field spectral density: e^2 S_E / (4 m hbar omega).
double continuous_heating_rate(double spectral_density, const IonSpecies& species,
                               const TrapConfig& trap);
/// Inverse of continuous_heating_rate.
double spectral_density_for_rate(double rate, const IonSpecies& species, const TrapConfig& trap);

/// One Gaussian kick of a continuous source: circularly symmetric complex
/// normal with <|alpha_k|^2> = e^2 S_E dt / (4 m hbar omega).
std::complex<double> continuous_kick(Rng& rng, double spectral_density, double dt, double omega,
                                     double mass);

/// Deterministic core of a photon absorption-emission kick, given the
/// emission projection sin(theta) cos(phi). The absorption projection
/// carries the velocity-dependent correction evaluated at the trajectory's
/// current effective occupation; absorption and emission share the trap
/// phase at the event time.
std::complex<double> discrete_kick_with_emission(const ScatterModel& model,
                                                 const TrapConfig& trap, double n_eff, double t,
                                                 double emission_projection);

/// One photon absorption-emission kick with the emission direction sampled
/// isotropically.
std::complex<double> discrete_kick(Rng& rng, const ScatterModel& model, const TrapConfig& trap,
                                   double n_eff, double t);

struct KickRecord {
    double time = 0.0;
    std::complex<double> kick;
};

struct TrajectorySample {
    double time = 0.0;
    std::complex<double> alpha_total;
    double n_eff = 0.0;  // initial_n + |alpha_total|^2, maintained as an identity
};

/// One semiclassical phase-space history.
struct Trajectory {
    std::uint64_t seed = 0;
    double initial_n = 0.0;
    std::vector<TrajectorySample> samples;
    std::vector<KickRecord> events;  // only when requested
};

struct TrajectoryOptions {
    bool record_events = false;
};

/// Evolve one trajectory under the given sources, recording the accumulated
/// displacement at each sample time. Fully deterministic in (seed, inputs):
/// the initial-state draw, the continuous stream and the discrete stream use
/// seeds derived from (seed, source kind), so adding one source never
/// perturbs another's draws.
Trajectory run_trajectory(double initial_n, std::span<const NoiseSource> sources,
                          const IonSpecies& species, const TrapConfig& trap, double t_final,
                          std::span<const double> sample_times, std::uint64_t seed,
                          const TrajectoryOptions& options = {});

/// As above with the initial level sampled from a distribution (first draw of
/// the trajectory's init stream).
Trajectory run_trajectory(const FockDistribution& initial, std::span<const NoiseSource> sources,
                          const IonSpecies& species, const TrapConfig& trap, double t_final,
                          std::span<const double> sample_times, std::uint64_t seed,
                          const TrajectoryOptions& options = {});

struct EnsembleOptions {
    int report_levels = 32;      // populations reported for levels 0..report_levels-1; 0 = nbar only
    int workers = 1;             // trajectory-level parallelism; never affects results
    double deficit_warn = 0.25;  // flag when the reported window loses this much mass
};

/// Trajectory-averaged populations and mean occupation with Monte Carlo
/// standard errors. Bit-identical for a given (master_seed, inputs) at any
/// worker count: per-trajectory streams derive from (master_seed, index) and
/// the reduction runs in index order.
struct EnsembleResult {
    std::vector<double> times;
    std::vector<std::vector<double>> populations;     // [time][level], ensemble mean
    std::vector<std::vector<double>> population_se;   // [time][level]
    std::vector<double> nbar;
    std::vector<double> nbar_se;
    std::vector<double> reported_deficit;             // 1 - sum of reported populations
    int trajectory_count = 0;
    bool truncation_warning = false;
};

EnsembleResult ensemble_average(const FockDistribution& initial,
                                std::span<const NoiseSource> sources, const IonSpecies& species,
                                const TrapConfig& trap, std::span<const double> t_grid, int n_traj,
                                std::uint64_t master_seed, const EnsembleOptions& options = {});

}  // namespace ionheat
