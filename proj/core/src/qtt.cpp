#include "ionheat/qtt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ionheat/constants.hpp"
#include "ionheat/displaced_fock.hpp"
#include "ionheat/errors.hpp"
#include "ionheat/parallel.hpp"

namespace ionheat {

namespace {

// Substream tags per draw purpose; keyed by source kind, not list position,
// so a run with {continuous} and one with {discrete, continuous} give the
// continuous source the same stream.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kContinuousStream = 1;
constexpr std::uint64_t kDiscreteStream = 2;

double sample_initial_level(const FockDistribution& initial, Rng& rng) {
    const double total = initial.sum();
    if (!(total > 0.0)) throw DomainError("run_trajectory: initial distribution has no mass");
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (int n = 0; n <= initial.max_level(); ++n) {
        acc += initial[n];
        if (u < acc) return static_cast<double>(n);
    }
    return static_cast<double>(initial.max_level());
}

}  // namespace

double continuous_heating_rate(double spectral_density, const IonSpecies& species,
                               const TrapConfig& trap) {
    if (!(spectral_density >= 0.0))
        throw DomainError("continuous_heating_rate: spectral density must be >= 0");
    const double e = constants::elementary_charge;
    return e * e * spectral_density /
           (4.0 * species.mass * constants::hbar * trap.secular_frequency);
}

double spectral_density_for_rate(double rate, const IonSpecies& species, const TrapConfig& trap) {
    if (!(rate >= 0.0)) throw DomainError("spectral_density_for_rate: rate must be >= 0");
    const double e = constants::elementary_charge;
    return rate * 4.0 * species.mass * constants::hbar * trap.secular_frequency / (e * e);
}

std::complex<double> continuous_kick(Rng& rng, double spectral_density, double dt, double omega,
                                     double mass) {
    if (!(dt > 0.0)) throw DomainError("continuous_kick: step must be > 0");
    const double e = constants::elementary_charge;
    const double variance = e * e * spectral_density * dt / (4.0 * mass * constants::hbar * omega);
    if (variance == 0.0) return {0.0, 0.0};
    const double s = std::sqrt(0.5 * variance);
    return {s * rng.normal(), s * rng.normal()};
}

std::complex<double> discrete_kick_with_emission(const ScatterModel& model,
                                                 const TrapConfig& trap, double n_eff, double t,
                                                 double emission_projection) {
    if (!(n_eff >= 0.0)) throw DomainError("discrete_kick: n_eff must be >= 0");
    const double omega = trap.secular_frequency;
    const double k = model.species.wavevector();
    const double scale = k * std::sqrt(constants::hbar / (2.0 * model.species.mass * omega));

    const double gamma = model.species.natural_linewidth;
    const double delta = model.laser.detuning;
    const double doppler = 8.0 * delta * n_eff * omega /
                           (gamma * gamma * (1.0 + model.modified_saturation) + 4.0 * delta * delta);
    const double absorption = std::sqrt(model.laser.absorption_geometry) * (1.0 + doppler);

    // i e^{i omega t} = (-sin, cos)
    const double phase = omega * t;
    return (absorption + emission_projection) * scale *
           std::complex<double>(-std::sin(phase), std::cos(phase));
}

std::complex<double> discrete_kick(Rng& rng, const ScatterModel& model, const TrapConfig& trap,
                                   double n_eff, double t) {
    return discrete_kick_with_emission(model, trap, n_eff, t, rng.emission_projection());
}

namespace {

struct SourceState {
    const ContinuousNoise* continuous = nullptr;
    const DiscreteNoise* discrete = nullptr;
};

SourceState classify_sources(std::span<const NoiseSource> sources) {
    SourceState st;
    for (const NoiseSource& src : sources) {
        if (const auto* c = std::get_if<ContinuousNoise>(&src)) {
            if (st.continuous) throw DomainError("run_trajectory: duplicate continuous source");
            st.continuous = c;
        } else if (const auto* d = std::get_if<DiscreteNoise>(&src)) {
            if (st.discrete) throw DomainError("run_trajectory: duplicate discrete source");
            st.discrete = d;
        }
    }
    return st;
}

Trajectory run_impl(double initial_n, std::span<const NoiseSource> sources,
                    const IonSpecies& species, const TrapConfig& trap, double t_final,
                    std::span<const double> sample_times, std::uint64_t seed,
                    const TrajectoryOptions& options) {
    species.validate();
    trap.validate();
    if (!(t_final >= 0.0)) throw DomainError("run_trajectory: t_final must be >= 0");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (!(sample_times[i] >= 0.0 && sample_times[i] <= t_final))
            throw DomainError("run_trajectory: sample times must lie in [0, t_final]");
        if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
            throw DomainError("run_trajectory: sample times must strictly increase");
    }

    const SourceState st = classify_sources(sources);

    double cont_variance = 0.0;
    Rng cont_rng(derive_stream_seed(seed, kContinuousStream));
    if (st.continuous) {
        if (!(st.continuous->step > 0.0))
            throw DomainError("run_trajectory: continuous step must be > 0");
        cont_variance = continuous_heating_rate(st.continuous->spectral_density, species, trap) *
                        st.continuous->step;
        if (cont_variance >= kick_smallness_limit)
            throw DomainError("run_trajectory: mean squared kick per step is " +
                              std::to_string(cont_variance) +
                              ", violating the smallness contract (< " +
                              std::to_string(kick_smallness_limit) + ")");
    }

    Rng disc_rng(derive_stream_seed(seed, kDiscreteStream));
    double disc_rate = 0.0;
    if (st.discrete) disc_rate = st.discrete->model.effective_rate;

    Trajectory traj;
    traj.seed = seed;
    traj.initial_n = initial_n;
    traj.samples.reserve(sample_times.size());

    std::complex<double> alpha{0.0, 0.0};
    const double inf = std::numeric_limits<double>::infinity();
    std::uint64_t cont_steps = 1;  // grid times as step * count, no accumulation drift
    double next_cont = st.continuous ? st.continuous->step : inf;
    double next_disc = (st.discrete && disc_rate > 0.0) ? disc_rng.exponential(disc_rate) : inf;

    auto n_eff = [&]() { return initial_n + std::norm(alpha); };

    std::size_t si = 0;
    while (si < sample_times.size()) {
        const double t_sample = sample_times[si];
        // Apply every kick that lands at or before this sample time.
        while (std::min(next_cont, next_disc) <= t_sample) {
            if (next_cont <= next_disc) {
                const std::complex<double> kick =
                    continuous_kick(cont_rng, st.continuous->spectral_density,
                                    st.continuous->step, trap.secular_frequency, species.mass);
                alpha += kick;
                if (options.record_events && kick != std::complex<double>{0.0, 0.0})
                    traj.events.push_back({next_cont, kick});
                ++cont_steps;
                next_cont = st.continuous->step * static_cast<double>(cont_steps);
            } else {
                const std::complex<double> kick =
                    discrete_kick(disc_rng, st.discrete->model, trap, n_eff(), next_disc);
                alpha += kick;
                if (options.record_events) traj.events.push_back({next_disc, kick});
                next_disc += disc_rng.exponential(disc_rate);
            }
        }
        traj.samples.push_back({t_sample, alpha, n_eff()});
        ++si;
    }
    return traj;
}

}  // namespace

Trajectory run_trajectory(double initial_n, std::span<const NoiseSource> sources,
                          const IonSpecies& species, const TrapConfig& trap, double t_final,
                          std::span<const double> sample_times, std::uint64_t seed,
                          const TrajectoryOptions& options) {
    if (!(initial_n >= 0.0)) throw DomainError("run_trajectory: initial_n must be >= 0");
    return run_impl(initial_n, sources, species, trap, t_final, sample_times, seed, options);
}

Trajectory run_trajectory(const FockDistribution& initial, std::span<const NoiseSource> sources,
                          const IonSpecies& species, const TrapConfig& trap, double t_final,
                          std::span<const double> sample_times, std::uint64_t seed,
                          const TrajectoryOptions& options) {
    Rng init_rng(derive_stream_seed(seed, kInitStream));
    const double n0 = sample_initial_level(initial, init_rng);
    return run_impl(n0, sources, species, trap, t_final, sample_times, seed, options);
}

EnsembleResult ensemble_average(const FockDistribution& initial,
                                std::span<const NoiseSource> sources, const IonSpecies& species,
                                const TrapConfig& trap, std::span<const double> t_grid, int n_traj,
                                std::uint64_t master_seed, const EnsembleOptions& options) {
    if (n_traj < 1) throw DomainError("ensemble_average: need at least one trajectory");
    if (t_grid.empty()) throw DomainError("ensemble_average: empty time grid");
    if (options.report_levels < 0) throw DomainError("ensemble_average: negative report_levels");

    const std::size_t n_times = t_grid.size();
    const std::size_t n_levels = static_cast<std::size_t>(options.report_levels);
    const double t_final = t_grid.back();

    // Initial levels with support; the displaced populations mix over these.
    std::vector<int> support;
    for (int n = 0; n <= initial.max_level(); ++n)
        if (initial[n] > 0.0) support.push_back(n);
    if (support.empty()) throw DomainError("ensemble_average: initial distribution has no mass");

    // Per-trajectory storage, written by index so parallel execution cannot
    // change anything.
    std::vector<double> alpha_sq(static_cast<std::size_t>(n_traj) * n_times);
    std::vector<double> init_n(static_cast<std::size_t>(n_traj));
    std::vector<double> pops;
    if (n_levels > 0) pops.resize(static_cast<std::size_t>(n_traj) * n_times * n_levels);

    parallel_for(static_cast<std::size_t>(n_traj), options.workers, [&](std::size_t idx) {
        const std::uint64_t seed = derive_stream_seed(master_seed, idx);
        const Trajectory traj =
            run_trajectory(initial, sources, species, trap, t_final, t_grid, seed);
        init_n[idx] = traj.initial_n;
        for (std::size_t ti = 0; ti < n_times; ++ti) {
            const double x = std::norm(traj.samples[ti].alpha_total);
            alpha_sq[idx * n_times + ti] = x;
            if (n_levels == 0) continue;
            double* out = &pops[(idx * n_times + ti) * n_levels];
            for (std::size_t m = 0; m < n_levels; ++m) {
                double p = 0.0;
                for (int n : support)
                    p += initial[n] * displaced_fock_prob(n, static_cast<int>(m), x);
                out[m] = p;
            }
        }
    });

    EnsembleResult result;
    result.times.assign(t_grid.begin(), t_grid.end());
    result.trajectory_count = n_traj;
    result.nbar.resize(n_times);
    result.nbar_se.resize(n_times);
    result.reported_deficit.assign(n_times, 0.0);
    if (n_levels > 0) {
        result.populations.assign(n_times, std::vector<double>(n_levels, 0.0));
        result.population_se.assign(n_times, std::vector<double>(n_levels, 0.0));
    }

    const double n_d = static_cast<double>(n_traj);
    for (std::size_t ti = 0; ti < n_times; ++ti) {
        double mean_n = 0.0;
        for (int i = 0; i < n_traj; ++i)
            mean_n += init_n[static_cast<std::size_t>(i)] +
                      alpha_sq[static_cast<std::size_t>(i) * n_times + ti];
        mean_n /= n_d;
        double var_n = 0.0;
        for (int i = 0; i < n_traj; ++i) {
            const double v = init_n[static_cast<std::size_t>(i)] +
                             alpha_sq[static_cast<std::size_t>(i) * n_times + ti] - mean_n;
            var_n += v * v;
        }
        result.nbar[ti] = mean_n;
        result.nbar_se[ti] = n_traj > 1 ? std::sqrt(var_n / (n_d * (n_d - 1.0))) : 0.0;

        for (std::size_t m = 0; m < n_levels; ++m) {
            double mean = 0.0;
            for (int i = 0; i < n_traj; ++i)
                mean += pops[(static_cast<std::size_t>(i) * n_times + ti) * n_levels + m];
            mean /= n_d;
            double var = 0.0;
            for (int i = 0; i < n_traj; ++i) {
                const double v =
                    pops[(static_cast<std::size_t>(i) * n_times + ti) * n_levels + m] - mean;
                var += v * v;
            }
            result.populations[ti][m] = mean;
            result.population_se[ti][m] = n_traj > 1 ? std::sqrt(var / (n_d * (n_d - 1.0))) : 0.0;
        }
        if (n_levels > 0) {
            double total = 0.0;
            for (double p : result.populations[ti]) total += p;
            result.reported_deficit[ti] = std::max(0.0, 1.0 - total);
            if (result.reported_deficit[ti] > options.deficit_warn) result.truncation_warning = true;
        }
    }
    return result;
}

}  // namespace ionheat
