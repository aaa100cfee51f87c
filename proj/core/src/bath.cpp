#include "ionheat/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "ionheat/errors.hpp"

namespace ionheat {

void BathParams::validate() const {
    if (!(rate >= 0.0)) throw DomainError("BathParams: rate must be >= 0");
    if (!(duration >= 0.0)) throw DomainError("BathParams: duration must be >= 0");
}

namespace {

// Streaming log-sum-exp accumulator for sums of positive terms whose
// individual magnitudes may overflow a double.
class LogSum {
public:
    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }
    double log() const {
        if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

struct LgammaTable {
    explicit LgammaTable(int n) : v(static_cast<std::size_t>(n) + 1) {
        for (int i = 0; i <= n; ++i) v[static_cast<std::size_t>(i)] = std::lgamma(i + 1.0);
    }
    // log C(a, b) for 0 <= b <= a
    double log_choose(int a, int b) const { return v[a] - v[b] - v[a - b]; }
    std::vector<double> v;  // lgamma(i + 1) = log(i!)
};

// log of G(r) = sum_{i >= r} C(i, r) * tau_ratio^(i-r) * p_i over the
// initial distribution, the reservoir-propagator sum over initial levels.
double log_g(const FockDistribution& initial, int r, double log_tau_ratio,
             const LgammaTable& lg) {
    LogSum acc;
    const int n_init = initial.max_level();
    for (int i = r; i <= n_init; ++i) {
        const double p = initial[i];
        if (p <= 0.0) continue;
        acc.add(lg.log_choose(i, r) + (i - r) * log_tau_ratio + std::log(p));
    }
    return acc.log();
}

double level_prob_impl(int n, double tau, const std::vector<double>& logg,
                       const LgammaTable& lg) {
    const double log_tau_ratio = std::log(tau / (1.0 + tau));
    const double log_beta = -std::log1p(tau);
    LogSum acc;
    for (int j = 0; j <= n; ++j) {
        const double g = logg[static_cast<std::size_t>(n - j)];
        if (g == -std::numeric_limits<double>::infinity()) continue;
        acc.add(lg.log_choose(n, j) + j * log_tau_ratio + 2.0 * (n - j) * log_beta + g);
    }
    const double l = acc.log();
    if (l == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(log_beta + l);
}

}  // namespace

FockDistribution bath_propagate(const FockDistribution& initial, const BathParams& params,
                                double deficit_warn) {
    params.validate();
    const double tau = params.rate * params.duration;
    if (tau == 0.0) return initial;

    const int n_max = initial.max_level();
    const LgammaTable lg(2 * n_max + 2);
    const double log_tau_ratio = std::log(tau / (1.0 + tau));

    std::vector<double> logg(static_cast<std::size_t>(n_max) + 1);
    for (int r = 0; r <= n_max; ++r) logg[static_cast<std::size_t>(r)] = log_g(initial, r, log_tau_ratio, lg);

    std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
    for (int n = 0; n <= n_max; ++n)
        out[static_cast<std::size_t>(n)] = level_prob_impl(n, tau, logg, lg);

    FockDistribution result = FockDistribution::from_probabilities(std::move(out));
    result.truncation_warning = result.deficit() > deficit_warn;
    return result;
}

double bath_level_prob(const FockDistribution& initial, const BathParams& params, int level) {
    params.validate();
    if (level < 0) throw DomainError("bath_level_prob: negative level");
    const double tau = params.rate * params.duration;
    if (tau == 0.0) return initial.at(level);

    const int n_max = initial.max_level();
    const LgammaTable lg(n_max + level + 2);
    const double log_tau_ratio = std::log(tau / (1.0 + tau));
    std::vector<double> logg(static_cast<std::size_t>(level) + 1);
    for (int r = 0; r <= level; ++r) logg[static_cast<std::size_t>(r)] = log_g(initial, r, log_tau_ratio, lg);
    return level_prob_impl(level, tau, logg, lg);
}

double bath_nbar(const FockDistribution& initial, const BathParams& params) {
    params.validate();
    return initial.mean() + params.rate * params.duration;
}

void PopulationDataset::add_counts(double time, int level, long counts, long shots) {
    if (shots < 1) throw DomainError("PopulationDataset: shots must be >= 1");
    if (counts < 0 || counts > shots) throw DomainError("PopulationDataset: counts outside [0, shots]");
    const double p = static_cast<double>(counts) / static_cast<double>(shots);
    const double p_smooth = (counts + 0.5) / (shots + 1.0);
    const double sigma = std::sqrt(p_smooth * (1.0 - p_smooth) / static_cast<double>(shots));
    samples.push_back({time, level, p, sigma, counts, shots});
}

namespace {

struct FitData {
    std::vector<double> times;                // unique, ascending
    std::vector<std::vector<PopulationSample>> by_time;  // samples grouped per unique time
    std::vector<double> weights;              // per sample, aligned with flattened order
};

double chi_square(const PopulationDataset& data, const FockDistribution& initial, double rate,
                  bool weighted, std::vector<double>* residuals = nullptr) {
    // Cache level probabilities per (time, level) for this rate.
    std::map<std::pair<double, int>, double> cache;
    double chi2 = 0.0;
    if (residuals) residuals->clear();
    for (const PopulationSample& s : data.samples) {
        const auto key = std::make_pair(s.time, s.level);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, bath_level_prob(initial, {rate, s.time}, s.level)).first;
        const double r = s.value - it->second;
        if (residuals) residuals->push_back(r);
        const double w = weighted ? 1.0 / (s.sigma * s.sigma) : 1.0;
        chi2 += w * r * r;
    }
    return chi2;
}

void validate_dataset(const PopulationDataset& data) {
    if (data.samples.size() < 2) throw DomainError("fit_bath_rate: need at least 2 samples");
    std::set<double> times;
    for (const PopulationSample& s : data.samples) {
        if (!(s.value >= 0.0 && s.value <= 1.0))
            throw DomainError("fit_bath_rate: population outside [0, 1]");
        if (!(s.time >= 0.0)) throw DomainError("fit_bath_rate: negative time");
        if (s.level < 0) throw DomainError("fit_bath_rate: negative level");
        times.insert(s.time);
    }
    if (times.size() < 2)
        throw FitError("fit_bath_rate: flat likelihood, need samples at >= 2 distinct times");
}

double auto_rate_upper(const PopulationDataset& data) {
    double t_max = 0.0;
    for (const PopulationSample& s : data.samples) t_max = std::max(t_max, s.time);
    // Crude scale: a rate that would push nbar*t ~ 100 by the last point.
    return 100.0 / t_max;
}

}  // namespace

FitResult fit_bath_rate(const PopulationDataset& data, const FockDistribution& initial,
                        const BathFitOptions& options) {
    validate_dataset(data);
    bool weighted = options.weighted;
    if (weighted) {
        bool any_sigma = false;
        for (const PopulationSample& s : data.samples) {
            if (s.sigma > 0.0) any_sigma = true;
            else if (s.sigma < 0.0) throw DomainError("fit_bath_rate: negative sigma");
        }
        if (!any_sigma) weighted = false;  // noiseless synthetic data
        else
            for (const PopulationSample& s : data.samples)
                if (s.sigma == 0.0)
                    throw DomainError("fit_bath_rate: zero sigma in weighted fit");
    }

    const double upper = options.rate_upper > 0.0 ? options.rate_upper : auto_rate_upper(data);
    auto objective = [&](double rate) { return chi_square(data, initial, rate, weighted); };

    int evals = 0;
    ScalarMinimizeOptions sopt;
    sopt.rel_tol = options.rel_tol;
    const double rate = minimize_scalar(objective, 0.0, upper, sopt, &evals);

    FitResult result;
    result.param_names = {"rate"};
    result.params = {rate};
    result.objective = chi_square(data, initial, rate, weighted, &result.residuals);
    result.evaluations = evals;

    const double step = std::max(rate * 1e-3, 1e-6 * upper);
    const double sigma = sigma_from_curvature(objective, rate, step);
    if (std::isnan(sigma))
        throw FitError("fit_bath_rate: flat likelihood, rate is unconstrained by the data");
    result.sigmas = {sigma};
    result.converged = true;
    result.message = weighted ? "weighted least squares" : "unweighted least squares";
    return result;
}

HeatingCurve cumulative_nbar_estimate(const PopulationDataset& data,
                                      const FockDistribution& initial,
                                      const BathFitOptions& options) {
    validate_dataset(data);
    PopulationDataset sorted = data;
    std::stable_sort(sorted.samples.begin(), sorted.samples.end(),
                     [](const PopulationSample& a, const PopulationSample& b) { return a.time < b.time; });

    std::vector<double> unique_times;
    for (const PopulationSample& s : sorted.samples)
        if (unique_times.empty() || s.time > unique_times.back()) unique_times.push_back(s.time);

    HeatingCurve curve;
    const double nbar0 = initial.mean();
    PopulationDataset prefix;
    std::size_t cursor = 0;
    std::size_t distinct = 0;
    for (double t : unique_times) {
        while (cursor < sorted.samples.size() && sorted.samples[cursor].time <= t)
            prefix.samples.push_back(sorted.samples[cursor++]);
        ++distinct;
        if (distinct < 2) continue;  // a one-point prefix cannot constrain the rate

        const FitResult fit = fit_bath_rate(prefix, initial, options);
        const double rate = fit.params[0];
        const double sigma = fit.sigmas[0];
        curve.times.push_back(t);
        curve.values.push_back(nbar0 + rate * t);
        curve.ci_low.push_back(nbar0 + std::max(rate - sigma, 0.0) * t);
        curve.ci_high.push_back(nbar0 + (rate + sigma) * t);
    }
    curve.validate();
    return curve;
}

}  // namespace ionheat
