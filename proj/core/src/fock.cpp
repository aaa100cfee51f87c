#include "ionheat/fock.hpp"

#include <cmath>
#include <string>

#include "ionheat/errors.hpp"

namespace ionheat {

FockDistribution FockDistribution::from_probabilities(std::vector<double> p, double norm_tol) {
    if (p.empty()) throw DomainError("FockDistribution: empty probability vector");
    double total = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double v = p[n];
        if (!std::isfinite(v) || v < -norm_tol)
            throw DomainError("FockDistribution: negative or non-finite probability at level " +
                              std::to_string(n));
        if (v < 0.0) p[n] = 0.0;  // numeric dust inside tolerance
        total += p[n];
    }
    if (total > 1.0 + norm_tol)
        throw DomainError("FockDistribution: probabilities sum to " + std::to_string(total) +
                          " > 1 + tolerance");
    return FockDistribution(std::move(p));
}

double FockDistribution::at(int n) const {
    if (n < 0) throw DomainError("FockDistribution: negative level");
    if (static_cast<std::size_t>(n) >= p_.size()) return 0.0;
    return p_[static_cast<std::size_t>(n)];
}

double FockDistribution::sum() const {
    double s = 0.0;
    for (double v : p_) s += v;
    return s;
}

double FockDistribution::deficit() const { return std::max(0.0, 1.0 - sum()); }

double FockDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < p_.size(); ++n) m += static_cast<double>(n) * p_[n];
    return m;
}

FockDistribution thermal_distribution(double nbar, int n_max) {
    if (!(nbar >= 0.0)) throw DomainError("thermal_distribution: nbar must be >= 0");
    if (n_max < 0) throw DomainError("thermal_distribution: n_max must be >= 0");
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
    const double q = nbar / (1.0 + nbar);
    double v = 1.0 / (1.0 + nbar);
    for (std::size_t n = 0; n < p.size(); ++n) {
        p[n] = v;
        v *= q;
    }
    return FockDistribution::from_probabilities(std::move(p));
}

FockDistribution fock_state(int n, int n_max) {
    if (n < 0 || n > n_max) throw DomainError("fock_state: level outside truncation");
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
    p[static_cast<std::size_t>(n)] = 1.0;
    return FockDistribution::from_probabilities(std::move(p));
}

namespace {

// Level probabilities of a single thermal component in terms of
// a = 1/(1 + nbar):  p0 = a,  p1 = a (1 - a).
double nbar_from_a(double a) { return 1.0 / a - 1.0; }

constexpr double kFeasTol = 1e-9;

bool valid_a(double a) { return a > 0.0 && a <= 1.0 + kFeasTol; }
bool valid_w(double w) { return w >= -kFeasTol && w <= 1.0 + kFeasTol; }

[[noreturn]] void infeasible(const char* why) {
    throw DomainError(std::string("solve_double_thermal: no feasible mixture (") + why + ")");
}

}  // namespace

DoubleThermalParams solve_double_thermal(double p0, double p1,
                                         const DoubleThermalConstraint& constraint) {
    if (!(p0 >= 0.0 && p0 <= 1.0) || !(p1 >= 0.0 && p1 <= 1.0))
        throw DomainError("solve_double_thermal: measured probabilities must be in [0, 1]");
    if (p0 + p1 > 1.0 + kFeasTol)
        infeasible("p0 + p1 > 1");
    if (p0 <= 0.0)
        infeasible("p0 = 0 has no thermal-mixture representation");

    using Fix = DoubleThermalConstraint::Fix;

    // Ground state: representable under every constraint by putting all
    // weight on a zero-temperature component.
    if (p1 == 0.0 && p0 == 1.0) {
        switch (constraint.fixed) {
            case Fix::weight: return {constraint.value, 0.0, 0.0};
            case Fix::cold_nbar:
                return constraint.value == 0.0 ? DoubleThermalParams{1.0, 0.0, 0.0}
                                               : DoubleThermalParams{0.0, constraint.value, 0.0};
            case Fix::hot_nbar:
                return constraint.value == 0.0 ? DoubleThermalParams{0.0, 0.0, 0.0}
                                               : DoubleThermalParams{1.0, 0.0, constraint.value};
        }
    }

    switch (constraint.fixed) {
        case Fix::weight: {
            const double w = constraint.value;
            if (!valid_w(w)) infeasible("constrained weight outside [0, 1]");
            if (w >= 1.0 - 1e-12) {
                // Collapses to a single thermal component.
                const double a = p0;
                if (std::abs(p1 - a * (1.0 - a)) > 1e-6)
                    infeasible("(p0, p1) inconsistent with a single thermal distribution");
                return {1.0, nbar_from_a(a), 0.0};
            }
            // (1-w) b^2 - 2 p0 (1-w) b + (p0^2 - w (p0 - p1)) = 0
            const double u = 1.0 - w;
            const double c2 = u, c1 = -2.0 * p0 * u, c0 = p0 * p0 - w * (p0 - p1);
            const double disc = c1 * c1 - 4.0 * c2 * c0;
            if (disc < 0.0) infeasible("no real hot component for the constrained weight");
            const double root = std::sqrt(disc);
            // Prefer the hotter component (smaller b); fall back to the other root.
            for (double b : {(-c1 - root) / (2.0 * c2), (-c1 + root) / (2.0 * c2)}) {
                if (!valid_a(b)) continue;
                const double a = (p0 - u * b) / w;
                if (!valid_a(a)) continue;
                return {w, nbar_from_a(std::min(a, 1.0)), nbar_from_a(std::min(b, 1.0))};
            }
            infeasible("constrained weight admits no component in range");
        }
        case Fix::hot_nbar: {
            const double b = 1.0 / (1.0 + constraint.value);
            const double den = p0 - p1 + b * b - 2.0 * p0 * b;
            if (std::abs(den) < 1e-300) infeasible("degenerate hot component");
            const double u = (p0 - p0 * p0 - p1) / den;  // u = 1 - w
            const double w = 1.0 - u;
            if (!valid_w(w)) infeasible("solved weight outside [0, 1]");
            if (w <= kFeasTol) {
                // All weight on the fixed hot component: levels must match it.
                if (std::abs(p0 - b) > 1e-6 || std::abs(p1 - b * (1.0 - b)) > 1e-6)
                    infeasible("zero cold weight but levels disagree with hot component");
                return {0.0, 0.0, constraint.value};
            }
            const double a = (p0 - u * b) / w;
            if (!valid_a(a)) infeasible("solved cold component outside range");
            return {std::min(w, 1.0), nbar_from_a(std::min(a, 1.0)), constraint.value};
        }
        case Fix::cold_nbar: {
            const double a = 1.0 / (1.0 + constraint.value);
            const double den = p0 - p1 + a * a - 2.0 * p0 * a;
            if (std::abs(den) < 1e-300) infeasible("degenerate cold component");
            const double w = (p0 - p0 * p0 - p1) / den;
            if (!valid_w(w)) infeasible("solved weight outside [0, 1]");
            if (w >= 1.0 - kFeasTol) {
                if (std::abs(p0 - a) > 1e-6 || std::abs(p1 - a * (1.0 - a)) > 1e-6)
                    infeasible("unit cold weight but levels disagree with cold component");
                return {1.0, constraint.value, 0.0};
            }
            const double b = (p0 - w * a) / (1.0 - w);
            if (!valid_a(b)) infeasible("solved hot component outside range");
            return {std::max(w, 0.0), constraint.value, nbar_from_a(std::min(b, 1.0))};
        }
    }
    throw DomainError("solve_double_thermal: unknown constraint");
}

FockDistribution double_thermal_from_levels(double p0, double p1,
                                            const DoubleThermalConstraint& constraint, int n_max) {
    const DoubleThermalParams m = solve_double_thermal(p0, p1, constraint);
    const FockDistribution cold = thermal_distribution(m.cold_nbar, n_max);
    const FockDistribution hot = thermal_distribution(m.hot_nbar, n_max);
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (std::size_t n = 0; n < p.size(); ++n)
        p[n] = m.weight * cold[static_cast<int>(n)] + (1.0 - m.weight) * hot[static_cast<int>(n)];
    return FockDistribution::from_probabilities(std::move(p));
}

}  // namespace ionheat
