#pragma once

#include <vector>

#include "ionheat/curve.hpp"
#include "ionheat/fitting.hpp"
#include "ionheat/fock.hpp"

namespace ionheat {

/// Continuous high-temperature reservoir coupling: a single linear heating
/// rate applied for a duration.
struct BathParams {
    double rate = 0.0;      // nbar-dot, quanta/s
    double duration = 0.0;  // s

    void validate() const;
};

/// Analytic propagation of the diagonal motional populations under weak
/// coupling to a high-temperature reservoir. The output lives on the same
/// truncated space as the input; probability that diffuses past the
/// truncation shows up as deficit() and raises truncation_warning above
/// deficit_warn.
FockDistribution bath_propagate(const FockDistribution& initial, const BathParams& params,
                                double deficit_warn = 1e-6);

/// Population of a single level after propagation. Same math as
/// bath_propagate restricted to one output level; O(levels * N) instead of
/// O(N^2), used by the fitters.
double bath_level_prob(const FockDistribution& initial, const BathParams& params, int level);

/// Mean occupation after propagation: nbar(t) = nbar(0) + rate * t. Matches
/// the mean of bath_propagate within truncation error.
double bath_nbar(const FockDistribution& initial, const BathParams& params);

/// One time-stamped measured level population with its 1-sigma uncertainty.
/// Samples built from raw counts keep them for lossless serialization.
struct PopulationSample {
    double time = 0.0;   // s
    int level = 0;
    double value = 0.0;  // measured probability
    double sigma = 0.0;  // 1-sigma; 0 means exact (noiseless synthetic data)
    long counts = 0;
    long shots = 0;      // 0 marks an analytic sample
};

struct PopulationDataset {
    std::vector<PopulationSample> samples;

    /// Append a binomially sampled point; sigma uses the (k+1/2)/(N+1)
    /// smoothed estimator so it never vanishes at k = 0 or k = N.
    void add_counts(double time, int level, long counts, long shots);
};

struct BathFitOptions {
    bool weighted = true;     // weight residuals by 1/sigma^2
    double rate_upper = 0.0;  // bracket upper bound, quanta/s; 0 = automatic
    double rel_tol = 1e-4;    // relative tolerance on the fitted rate
};

/// Weighted least-squares fit of the single heating rate to measured level
/// populations. Returns the point estimate, a curvature-based 1-sigma
/// uncertainty and the residuals. Throws FitError on a flat likelihood.
FitResult fit_bath_rate(const PopulationDataset& data, const FockDistribution& initial,
                        const BathFitOptions& options = {});

/// nbar(t_k) from a cumulative fit: the rate entering the k-th point is
/// fitted on data up to t_k only, then the initial state is propagated to
/// t_k. Prefix fits are independent; this implementation runs them in data
/// order so results never depend on scheduling.
HeatingCurve cumulative_nbar_estimate(const PopulationDataset& data,
                                      const FockDistribution& initial,
                                      const BathFitOptions& options = {});

}  // namespace ionheat
