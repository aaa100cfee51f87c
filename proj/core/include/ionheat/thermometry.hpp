#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ionheat/fitting.hpp"
#include "ionheat/fock.hpp"

namespace ionheat {

enum class TransitionKind { carrier, blue_sideband };

/// One point of a Rabi-flop record: bright-state counts out of shots after a
/// pulse of the given duration. shots == 0 marks analytic data, with counts
/// holding the exact probability.
struct FlopPoint {
    double time = 0.0;   // pulse duration, s
    double counts = 0.0;
    long shots = 0;
};

struct FlopDataset {
    TransitionKind kind = TransitionKind::blue_sideband;
    std::vector<FlopPoint> points;
    double rabi_prior = 0.0;  // optional Omega_0 prior, rad/s (0 = none)

    /// Sort points by duration; input order is not significant.
    void canonicalize();
    void validate() const;

    /// Measured bright probability of a point.
    static double probability(const FlopPoint& p) {
        return p.shots > 0 ? p.counts / static_cast<double>(p.shots) : p.counts;
    }
    /// Smoothed binomial 1-sigma of a point; 0 for analytic data.
    static double sigma(const FlopPoint& p);
};

/// First-order Lamb-Dicke blue-sideband signal
///   P(t) = sum_n p_n sin^2(rabi * eta * sqrt(n+1) * t / 2).
double sideband_signal(const FockDistribution& p, double rabi, double eta, double t);

/// First-order sideband model validity: eta * sqrt(n_levels) must be small.
bool lamb_dicke_regime_ok(double eta, int n_levels);

/// Level populations from a linear inversion with bootstrap intervals.
struct PopulationEstimate {
    std::vector<double> point;   // direct solution, clipped to [0, 1]
    std::vector<double> median;  // per-level bootstrap median
    std::vector<double> lo;      // 15.9th percentile
    std::vector<double> hi;      // 84.1th percentile
    int bootstrap_count = 0;
    double residual_norm = 0.0;  // ||M p - y|| of the returned point solution
    bool lamb_dicke_warning = false;
};

struct SvdOptions {
    double singular_threshold = 1e-8;  // relative to the largest singular value
    int workers = 1;
};

/// Invert blue-sideband flop data into level populations via the
/// pseudo-inverse of the sideband design matrix, discarding singular values
/// below threshold * sigma_max. Negative entries are clipped; the total is
/// rescaled only when it exceeds one. Asymmetric intervals come from
/// re-solving binomially resampled counts.
PopulationEstimate svd_populations(const FlopDataset& data, int n_levels, double rabi, double eta,
                                   int bootstrap_count, std::uint64_t seed,
                                   const SvdOptions& options = {});

/// Carrier Rabi signal with Debye-Waller coupling to both radial modes,
/// thermal in each with nbar_y = ratio * nbar_x. The thermal sums truncate
/// adaptively so the omitted joint weight stays below tail_tol; if that needs
/// more than n_max levels a NumericError reports the required depth.
double carrier_signal_two_mode(double nbar_x, double ratio, double rabi, double eta_x,
                               double eta_y, double t, int n_max = 4000, double tail_tol = 1e-6);

struct CarrierFitOptions {
    int n_max = 4000;
    double tail_tol = 1e-6;
    double rel_tol = 1e-6;   // on the objective, per optimizer step
    int max_iter = 400;
    double nbar_upper = 150.0;  // search ceiling for nbar_x
};

/// Nonlinear least squares for (Omega_0, nbar_x) on carrier flop data.
/// Start points come from the periodogram peak, corrected by the thermal
/// mean Debye-Waller factor exp(-nbar eta^2) per mode, over a coarse nbar
/// grid; the best cells are polished with a derivative-free simplex.
FitResult fit_carrier_nbar(const FlopDataset& data, double eta_x, double eta_y, double ratio,
                           const CarrierFitOptions& options = {});

struct LevelObservation {
    int level = 0;
    double value = 0.0;
    double sigma = 0.0;  // 0 = exact
};

/// Weighted fit of a thermal distribution to a few measured level
/// populations; returns nbar with a curvature-based uncertainty.
FitResult fit_thermal_from_levels(std::span<const LevelObservation> levels);

}  // namespace ionheat
