#include "ionheat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ionheat/errors.hpp"
#include "ionheat/rng.hpp"

namespace ionheat {

void ExperimentSchedule::validate() const {
    if (delays.empty()) throw DomainError("ExperimentSchedule: no heating delays");
    for (double d : delays)
        if (!(d >= 0.0)) throw DomainError("ExperimentSchedule: negative delay");
    if (probe.durations.empty()) throw DomainError("ExperimentSchedule: no probe durations");
    if (probe.shots < 0) throw DomainError("ExperimentSchedule: negative shot count");
}

FockDistribution truth_state_at(const TruthModel& truth, double delay, std::uint64_t seed) {
    if (const auto* bath = std::get_if<BathTruth>(&truth)) {
        return bath_propagate(bath->initial, {bath->rate, delay});
    }
    if (const auto* qtt = std::get_if<QttTruth>(&truth)) {
        const double t_grid[] = {delay};
        EnsembleOptions opt;
        opt.report_levels = qtt->report_levels;
        opt.workers = qtt->workers;
        const EnsembleResult ens =
            ensemble_average(qtt->initial, qtt->sources, qtt->species, qtt->trap, t_grid,
                             qtt->trajectories, seed, opt);
        FockDistribution state =
            FockDistribution::from_probabilities(ens.populations[0], FockDistribution::fitted_norm_tol);
        state.truncation_warning = ens.truncation_warning;
        return state;
    }
    const auto& det = std::get<DetectionHeatingTruth>(truth);
    const double nbar = nbar_of_t(det.model, det.trap, det.nbar0, delay);
    if (!std::isfinite(nbar))
        throw NumericError("truth_state_at: detection-heating nbar diverged at this delay");
    return thermal_distribution(nbar);
}

namespace {

double probe_signal(const ProbeParams& probe, const FockDistribution& state, double duration) {
    if (probe.kind == TransitionKind::blue_sideband)
        return sideband_signal(state, probe.rabi, probe.eta, duration);
    // Carrier probes assume the thermal shape at the state's mean occupation.
    return carrier_signal_two_mode(state.mean(), probe.ratio, probe.rabi, probe.eta_x, probe.eta_y,
                                   duration);
}

}  // namespace

std::vector<DelayedFlop> generate_dataset(const TruthModel& truth,
                                          const ExperimentSchedule& schedule) {
    schedule.validate();
    std::vector<DelayedFlop> out;
    out.reserve(schedule.delays.size());
    for (std::size_t d = 0; d < schedule.delays.size(); ++d) {
        const std::uint64_t truth_seed = derive_stream_seed(schedule.seed, 2 * d);
        Rng count_rng(derive_stream_seed(schedule.seed, 2 * d + 1));
        const FockDistribution state = truth_state_at(truth, schedule.delays[d], truth_seed);

        DelayedFlop rec;
        rec.delay = schedule.delays[d];
        rec.data.kind = schedule.probe.kind;
        rec.data.rabi_prior = schedule.probe.rabi;
        for (double tau : schedule.probe.durations) {
            const double p = probe_signal(schedule.probe, state, tau);
            FlopPoint pt;
            pt.time = tau;
            if (schedule.probe.shots > 0) {
                pt.shots = schedule.probe.shots;
                pt.counts = static_cast<double>(count_rng.binomial(schedule.probe.shots, p));
            } else {
                pt.shots = 0;
                pt.counts = p;
            }
            rec.data.points.push_back(pt);
        }
        rec.data.canonicalize();
        out.push_back(std::move(rec));
    }
    return out;
}

PopulationDataset generate_population_dataset(const TruthModel& truth,
                                              std::span<const double> delays,
                                              std::span<const int> levels, long shots,
                                              std::uint64_t seed) {
    if (delays.empty() || levels.empty())
        throw DomainError("generate_population_dataset: empty delays or levels");
    PopulationDataset data;
    for (std::size_t d = 0; d < delays.size(); ++d) {
        const std::uint64_t truth_seed = derive_stream_seed(seed, 2 * d);
        Rng count_rng(derive_stream_seed(seed, 2 * d + 1));
        const FockDistribution state = truth_state_at(truth, delays[d], truth_seed);
        for (int lvl : levels) {
            const double p = state.at(lvl);
            if (shots > 0) {
                data.add_counts(delays[d], lvl, count_rng.binomial(shots, p), shots);
            } else {
                data.samples.push_back({delays[d], lvl, p, 0.0});
            }
        }
    }
    return data;
}

FockDistribution oracle_master_equation(const FockDistribution& initial, double rate, double t,
                                        int n_max, double leak_tol) {
    if (!(rate >= 0.0)) throw DomainError("oracle_master_equation: rate must be >= 0");
    if (!(t >= 0.0)) throw DomainError("oracle_master_equation: time must be >= 0");
    if (n_max < initial.max_level()) {
        double cut = 0.0;
        for (int n = n_max + 1; n <= initial.max_level(); ++n) cut += initial[n];
        if (cut > 1e-12)
            throw DomainError("oracle_master_equation: n_max would truncate initial mass");
    }

    const std::size_t size = static_cast<std::size_t>(n_max) + 1;
    std::vector<double> rho(size, 0.0);
    for (int n = 0; n <= std::min(initial.max_level(), n_max); ++n)
        rho[static_cast<std::size_t>(n)] = initial[n];
    if (rate == 0.0 || t == 0.0)
        return FockDistribution::from_probabilities(std::move(rho), FockDistribution::fitted_norm_tol);

    // Classical RK4 with rate * h <= 1e-3: plain and rigid, which is all a
    // test fixture needs.
    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(rate * t / 1e-3)));
    const double h = t / static_cast<double>(n_steps);

    auto derivative = [&](const std::vector<double>& y, std::vector<double>& dy) {
        for (std::size_t n = 0; n < size; ++n) {
            const double up = n + 1 < size ? (n + 1.0) * y[n + 1] : 0.0;
            const double down = n > 0 ? static_cast<double>(n) * y[n - 1] : 0.0;
            dy[n] = rate * (up + down - (2.0 * n + 1.0) * y[n]);
        }
    };

    std::vector<double> k1(size), k2(size), k3(size), k4(size), tmp(size);
    for (long step = 0; step < n_steps; ++step) {
        derivative(rho, k1);
        for (std::size_t n = 0; n < size; ++n) tmp[n] = rho[n] + 0.5 * h * k1[n];
        derivative(tmp, k2);
        for (std::size_t n = 0; n < size; ++n) tmp[n] = rho[n] + 0.5 * h * k2[n];
        derivative(tmp, k3);
        for (std::size_t n = 0; n < size; ++n) tmp[n] = rho[n] + h * k3[n];
        derivative(tmp, k4);
        for (std::size_t n = 0; n < size; ++n)
            rho[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }

    double total = 0.0;
    for (double v : rho) total += v;
    const double leakage = 1.0 - total - initial.deficit();
    if (leakage > leak_tol)
        throw NumericError("oracle_master_equation: boundary leakage " + std::to_string(leakage) +
                           " exceeds tolerance; raise n_max");
    return FockDistribution::from_probabilities(std::move(rho), FockDistribution::fitted_norm_tol);
}

}  // namespace ionheat
