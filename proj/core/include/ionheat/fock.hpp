#pragma once

#include <span>
#include <vector>

namespace ionheat {

/// Default truncation of Fock-space distributions. Generous headroom over the
/// ~100 levels needed for post-cooling states so that Doppler-limit states
/// (nbar ~ 13) keep their tails representable.
inline constexpr int default_fock_truncation = 400;

/// Truncated probability distribution over motional number states 0..N_max.
/// Entries are non-negative and sum to at most 1 + tolerance; any missing
/// probability is attributed to truncation and reported as deficit().
class FockDistribution {
public:
    /// Tolerance on the total probability of analytically constructed
    /// distributions (numeric error only).
    static constexpr double analytic_norm_tol = 1e-12;
    /// Tolerance for distributions assembled from fitted/estimated values.
    static constexpr double fitted_norm_tol = 1e-6;

    FockDistribution() = default;

    static FockDistribution from_probabilities(std::vector<double> p,
                                               double norm_tol = analytic_norm_tol);

    int max_level() const { return static_cast<int>(p_.size()) - 1; }
    std::size_t size() const { return p_.size(); }

    double operator[](int n) const { return p_[static_cast<std::size_t>(n)]; }
    /// Probability of level n; zero above the truncation.
    double at(int n) const;

    std::span<const double> probabilities() const { return p_; }

    double sum() const;
    /// 1 - sum(): probability mass lost to truncation (clamped at 0).
    double deficit() const;
    double mean() const;

    /// Set by operations that detect significant probability leakage past the
    /// truncation boundary (warning-grade diagnostic, not an error).
    bool truncation_warning = false;

private:
    explicit FockDistribution(std::vector<double> p) : p_(std::move(p)) {}
    std::vector<double> p_;
};

/// Thermal (geometric) distribution with mean occupation nbar, truncated at
/// n_max levels above the ground state.
FockDistribution thermal_distribution(double nbar, int n_max = default_fock_truncation);

/// Pure number state |n> on a truncated space.
FockDistribution fock_state(int n, int n_max = default_fock_truncation);

/// Closure for the under-determined two-component thermal mixture: two
/// measured levels constrain three parameters (weight w, cold nbar, hot
/// nbar), so one must be pinned by the caller.
struct DoubleThermalConstraint {
    enum class Fix { weight, cold_nbar, hot_nbar };
    Fix fixed = Fix::hot_nbar;
    double value = 10.0;

    static DoubleThermalConstraint fix_weight(double w) { return {Fix::weight, w}; }
    static DoubleThermalConstraint fix_cold_nbar(double nbar) { return {Fix::cold_nbar, nbar}; }
    static DoubleThermalConstraint fix_hot_nbar(double nbar) { return {Fix::hot_nbar, nbar}; }
};

struct DoubleThermalParams {
    double weight;     // w of the cold component, in [0, 1]
    double cold_nbar;  // nbar_c >= 0
    double hot_nbar;   // nbar_h >= 0
};

/// Solve for the mixture whose level-0 and level-1 probabilities equal the
/// measured values under the supplied constraint. Throws DomainError when no
/// feasible mixture exists.
DoubleThermalParams solve_double_thermal(double p0_meas, double p1_meas,
                                         const DoubleThermalConstraint& constraint);

/// w * thermal(nbar_c) + (1 - w) * thermal(nbar_h) with the solved parameters.
FockDistribution double_thermal_from_levels(
    double p0_meas, double p1_meas,
    const DoubleThermalConstraint& constraint = DoubleThermalConstraint{},
    int n_max = default_fock_truncation);

}  // namespace ionheat
