#include "ionheat/thermometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>
#include <string>

#include "ionheat/constants.hpp"
#include "ionheat/errors.hpp"
#include "ionheat/laguerre.hpp"
#include "ionheat/parallel.hpp"
#include "ionheat/rng.hpp"

namespace ionheat {

void FlopDataset::canonicalize() {
    std::stable_sort(points.begin(), points.end(),
                     [](const FlopPoint& a, const FlopPoint& b) { return a.time < b.time; });
}

void FlopDataset::validate() const {
    for (const FlopPoint& p : points) {
        if (!(p.time >= 0.0)) throw DomainError("FlopDataset: negative pulse duration");
        if (p.shots < 0) throw DomainError("FlopDataset: negative shot count");
        if (p.shots > 0) {
            if (p.counts < 0.0 || p.counts > static_cast<double>(p.shots))
                throw DomainError("FlopDataset: counts outside [0, shots]");
        } else if (!(p.counts >= 0.0 && p.counts <= 1.0)) {
            throw DomainError("FlopDataset: analytic probability outside [0, 1]");
        }
    }
}

double FlopDataset::sigma(const FlopPoint& p) {
    if (p.shots <= 0) return 0.0;
    const double smooth = (p.counts + 0.5) / (p.shots + 1.0);
    return std::sqrt(smooth * (1.0 - smooth) / static_cast<double>(p.shots));
}

double sideband_signal(const FockDistribution& p, double rabi, double eta, double t) {
    if (!(rabi > 0.0) || !(eta > 0.0)) throw DomainError("sideband_signal: rabi and eta must be > 0");
    if (!(t >= 0.0)) throw DomainError("sideband_signal: negative duration");
    double signal = 0.0;
    for (int n = 0; n <= p.max_level(); ++n) {
        if (p[n] == 0.0) continue;
        const double s = std::sin(0.5 * rabi * eta * std::sqrt(n + 1.0) * t);
        signal += p[n] * s * s;
    }
    return signal;
}

bool lamb_dicke_regime_ok(double eta, int n_levels) {
    return eta * std::sqrt(static_cast<double>(std::max(n_levels, 0))) < 0.3;
}

namespace {

Eigen::MatrixXd sideband_design(const FlopDataset& data, int n_levels, double rabi, double eta) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(data.points.size()), n_levels);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double t = data.points[static_cast<std::size_t>(i)].time;
        for (int n = 0; n < n_levels; ++n) {
            const double s = std::sin(0.5 * rabi * eta * std::sqrt(n + 1.0) * t);
            m(i, n) = s * s;
        }
    }
    return m;
}

std::vector<double> clip_unit(const Eigen::VectorXd& p) {
    std::vector<double> out(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i)
        out[static_cast<std::size_t>(i)] = std::clamp(p(i), 0.0, 1.0);
    return out;
}

double percentile(std::vector<double>& sorted_values, double q) {
    const std::size_t n = sorted_values.size();
    if (n == 1) return sorted_values[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= n) return sorted_values[n - 1];
    const double frac = pos - static_cast<double>(i);
    return sorted_values[i] * (1.0 - frac) + sorted_values[i + 1] * frac;
}

}  // namespace

PopulationEstimate svd_populations(const FlopDataset& data, int n_levels, double rabi, double eta,
                                   int bootstrap_count, std::uint64_t seed,
                                   const SvdOptions& options) {
    data.validate();
    if (data.kind != TransitionKind::blue_sideband)
        throw DomainError("svd_populations: dataset is not a blue-sideband record");
    if (n_levels < 1) throw DomainError("svd_populations: need at least one level");
    if (data.points.size() < static_cast<std::size_t>(n_levels))
        throw DomainError("svd_populations: fewer time points than levels");
    if (bootstrap_count < 0) throw DomainError("svd_populations: negative bootstrap count");

    FlopDataset sorted = data;
    sorted.canonicalize();

    const Eigen::MatrixXd m = sideband_design(sorted, n_levels, rabi, eta);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = options.singular_threshold * sv(0);

    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    std::vector<int> dropped;
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
        if (sv(j) >= cutoff && sv(j) > 0.0) {
            inv_sv(j) = 1.0 / sv(j);
        } else {
            Eigen::Index lvl;
            svd.matrixV().col(j).cwiseAbs().maxCoeff(&lvl);
            dropped.push_back(static_cast<int>(lvl));
        }
    }
    if (!dropped.empty()) {
        std::string msg = "svd_populations: ill-posed design, schedule does not constrain level(s)";
        for (int l : dropped) msg += " " + std::to_string(l);
        throw FitError(msg);
    }

    auto solve = [&](const Eigen::VectorXd& y) {
        return Eigen::VectorXd(svd.matrixV() * (inv_sv.asDiagonal() * (svd.matrixU().transpose() * y)));
    };

    const std::size_t n_pts = sorted.points.size();
    Eigen::VectorXd y(static_cast<Eigen::Index>(n_pts));
    for (std::size_t i = 0; i < n_pts; ++i)
        y(static_cast<Eigen::Index>(i)) = FlopDataset::probability(sorted.points[i]);

    PopulationEstimate est;
    est.lamb_dicke_warning = !lamb_dicke_regime_ok(eta, n_levels);

    est.point = clip_unit(solve(y));
    double total = 0.0;
    for (double v : est.point) total += v;
    if (total > 1.0)
        for (double& v : est.point) v /= total;

    Eigen::VectorXd p_vec(static_cast<Eigen::Index>(est.point.size()));
    for (std::size_t i = 0; i < est.point.size(); ++i)
        p_vec(static_cast<Eigen::Index>(i)) = est.point[i];
    est.residual_norm = (m * p_vec - y).norm();

    const bool analytic = std::all_of(sorted.points.begin(), sorted.points.end(),
                                      [](const FlopPoint& p) { return p.shots == 0; });
    if (bootstrap_count == 0 || analytic) {
        est.median = est.point;
        est.lo = est.point;
        est.hi = est.point;
        est.bootstrap_count = 0;
        return est;
    }

    // Binomial resampling of the raw counts, one derived stream per replicate.
    std::vector<std::vector<double>> replicates(static_cast<std::size_t>(bootstrap_count));
    parallel_for(static_cast<std::size_t>(bootstrap_count), options.workers, [&](std::size_t b) {
        Rng rng(derive_stream_seed(seed, b));
        Eigen::VectorXd yb(static_cast<Eigen::Index>(n_pts));
        for (std::size_t i = 0; i < n_pts; ++i) {
            const FlopPoint& pt = sorted.points[i];
            const double p_hat = FlopDataset::probability(pt);
            yb(static_cast<Eigen::Index>(i)) =
                pt.shots > 0
                    ? static_cast<double>(rng.binomial(pt.shots, p_hat)) / static_cast<double>(pt.shots)
                    : p_hat;
        }
        replicates[b] = clip_unit(solve(yb));
    });

    est.bootstrap_count = bootstrap_count;
    est.median.resize(static_cast<std::size_t>(n_levels));
    est.lo.resize(static_cast<std::size_t>(n_levels));
    est.hi.resize(static_cast<std::size_t>(n_levels));
    std::vector<double> column(static_cast<std::size_t>(bootstrap_count));
    for (int lvl = 0; lvl < n_levels; ++lvl) {
        for (int b = 0; b < bootstrap_count; ++b)
            column[static_cast<std::size_t>(b)] = replicates[static_cast<std::size_t>(b)][static_cast<std::size_t>(lvl)];
        std::sort(column.begin(), column.end());
        est.median[static_cast<std::size_t>(lvl)] = percentile(column, 0.5);
        est.lo[static_cast<std::size_t>(lvl)] = percentile(column, 0.159);
        est.hi[static_cast<std::size_t>(lvl)] = percentile(column, 0.841);
    }
    return est;
}

namespace {

// Thermal truncation depth for a single mode: smallest N with tail mass
// q^(N+1) <= tol.
int thermal_depth(double nbar, double tol) {
    if (nbar <= 0.0) return 0;
    const double q = nbar / (1.0 + nbar);
    const double n = std::log(tol) / std::log(q) - 1.0;
    return std::max(0, static_cast<int>(std::ceil(n)));
}

// Flattened two-mode carrier terms: effective Laguerre products u with
// joint thermal weights w.
struct CarrierTerms {
    std::vector<double> u;
    std::vector<double> w;
    double debye_waller = 1.0;  // exp(-eta_x^2/2) exp(-eta_y^2/2)
};

CarrierTerms carrier_terms(double nbar_x, double ratio, double eta_x, double eta_y, int n_max,
                           double tail_tol) {
    if (!(nbar_x >= 0.0)) throw DomainError("carrier model: nbar_x must be >= 0");
    if (!(ratio > 0.0)) throw DomainError("carrier model: mode ratio must be > 0");
    const double nbar_y = ratio * nbar_x;
    const int nx = thermal_depth(nbar_x, 0.5 * tail_tol);
    const int ny = thermal_depth(nbar_y, 0.5 * tail_tol);
    if (nx > n_max || ny > n_max)
        throw NumericError("carrier model: truncation ceiling exceeded, need " +
                           std::to_string(std::max(nx, ny)) + " levels");

    const double ex2 = eta_x * eta_x, ey2 = eta_y * eta_y;
    std::vector<double> lx(static_cast<std::size_t>(nx) + 1), ly(static_cast<std::size_t>(ny) + 1);
    for (int n = 0; n <= nx; ++n) lx[static_cast<std::size_t>(n)] = laguerre(n, 0, ex2);
    for (int n = 0; n <= ny; ++n) ly[static_cast<std::size_t>(n)] = laguerre(n, 0, ey2);

    const double qx = nbar_x / (1.0 + nbar_x), qy = nbar_y / (1.0 + nbar_y);
    std::vector<double> px(lx.size()), py(ly.size());
    double v = 1.0 / (1.0 + nbar_x);
    for (std::size_t n = 0; n < px.size(); ++n) { px[n] = v; v *= qx; }
    v = 1.0 / (1.0 + nbar_y);
    for (std::size_t n = 0; n < py.size(); ++n) { py[n] = v; v *= qy; }

    CarrierTerms terms;
    terms.debye_waller = std::exp(-0.5 * ex2) * std::exp(-0.5 * ey2);
    terms.u.reserve(px.size() * py.size());
    terms.w.reserve(px.size() * py.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
        for (std::size_t j = 0; j < py.size(); ++j) {
            terms.u.push_back(lx[i] * ly[j]);
            terms.w.push_back(px[i] * py[j]);
        }
    }
    return terms;
}

// P(t) = 1/2 (sum w - sum_j w_j cos(rabi * dw * u_j * t)), evaluated on a
// grid. Uniform grids use a rotation recurrence instead of per-point cos.
void carrier_signal_grid(const CarrierTerms& terms, double rabi, std::span<const double> times,
                         std::vector<double>& out) {
    out.assign(times.size(), 0.0);
    double w_total = 0.0;
    for (double w : terms.w) w_total += w;

    bool uniform = times.size() >= 3;
    const double h = times.size() >= 2 ? times[1] - times[0] : 0.0;
    for (std::size_t i = 0; i + 1 < times.size() && uniform; ++i)
        if (std::abs((times[i + 1] - times[i]) - h) > 1e-9 * std::max(std::abs(h), 1e-30))
            uniform = false;

    const double scale = rabi * terms.debye_waller;
    if (uniform && h > 0.0) {
        const double t0 = times[0];
        for (std::size_t j = 0; j < terms.u.size(); ++j) {
            const double wj = terms.w[j];
            const double omega = scale * terms.u[j];
            const std::complex<double> step(std::cos(omega * h), std::sin(omega * h));
            std::complex<double> z(std::cos(omega * t0), std::sin(omega * t0));
            for (std::size_t i = 0; i < times.size(); ++i) {
                out[i] += wj * z.real();
                z *= step;
            }
        }
    } else {
        for (std::size_t j = 0; j < terms.u.size(); ++j) {
            const double wj = terms.w[j];
            const double omega = scale * terms.u[j];
            for (std::size_t i = 0; i < times.size(); ++i) out[i] += wj * std::cos(omega * times[i]);
        }
    }
    for (double& p : out) p = 0.5 * (w_total - p);
}

}  // namespace

double carrier_signal_two_mode(double nbar_x, double ratio, double rabi, double eta_x,
                               double eta_y, double t, int n_max, double tail_tol) {
    if (!(rabi > 0.0)) throw DomainError("carrier_signal_two_mode: rabi must be > 0");
    if (!(t >= 0.0)) throw DomainError("carrier_signal_two_mode: negative duration");
    if (!(eta_x >= 0.0 && eta_y >= 0.0))
        throw DomainError("carrier_signal_two_mode: negative Lamb-Dicke parameter");
    const CarrierTerms terms = carrier_terms(nbar_x, ratio, eta_x, eta_y, n_max, tail_tol);
    const double dw = terms.debye_waller;
    double p = 0.0;
    for (std::size_t j = 0; j < terms.u.size(); ++j) {
        const double s = std::sin(0.5 * rabi * dw * terms.u[j] * t);
        p += terms.w[j] * s * s;
    }
    return p;
}

namespace {

double periodogram_peak(const std::vector<double>& times, const std::vector<double>& values) {
    const std::size_t n = times.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);

    double span = times.back() - times.front();
    double dt_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) dt_min = std::min(dt_min, times[i + 1] - times[i]);
    if (!(span > 0.0) || !(dt_min > 0.0))
        throw FitError("fit_carrier_nbar: degenerate pulse-duration schedule");

    const double w_lo = constants::pi / span;    // half a cycle across the record
    const double w_hi = constants::pi / dt_min;  // Nyquist-like ceiling
    const int grid = 2048;
    double best_w = w_lo, best_p = -1.0;
    for (int g = 0; g < grid; ++g) {
        const double w = w_lo + (w_hi - w_lo) * (g + 0.5) / grid;
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            acc += (values[i] - mean) * std::complex<double>(std::cos(w * times[i]), -std::sin(w * times[i]));
        const double power = std::norm(acc);
        if (power > best_p) { best_p = power; best_w = w; }
    }
    return best_w;
}

}  // namespace

FitResult fit_carrier_nbar(const FlopDataset& data, double eta_x, double eta_y, double ratio,
                           const CarrierFitOptions& options) {
    data.validate();
    if (data.kind != TransitionKind::carrier)
        throw DomainError("fit_carrier_nbar: dataset is not a carrier record");
    if (data.points.size() < 10) throw DomainError("fit_carrier_nbar: need at least 10 points");

    FlopDataset sorted = data;
    sorted.canonicalize();
    const std::size_t n_pts = sorted.points.size();
    std::vector<double> times(n_pts), values(n_pts), weights(n_pts);
    bool weighted = false;
    for (std::size_t i = 0; i < n_pts; ++i) {
        times[i] = sorted.points[i].time;
        values[i] = FlopDataset::probability(sorted.points[i]);
        const double s = FlopDataset::sigma(sorted.points[i]);
        if (s > 0.0) { weights[i] = 1.0 / (s * s); weighted = true; }
        else weights[i] = 1.0;
    }
    if (!weighted) std::fill(weights.begin(), weights.end(), 1.0);

    const double peak = periodogram_peak(times, values);
    const double span = times.back() - times.front();
    if (span * peak < 2.0 * constants::two_pi)
        throw DomainError("fit_carrier_nbar: schedule spans fewer than two flop periods");

    const double ex2 = eta_x * eta_x, ey2 = eta_y * eta_y;
    const double dw = std::exp(-0.5 * ex2) * std::exp(-0.5 * ey2);
    // Thermal mean Debye-Waller factor: <L_n(eta^2)> = exp(-nbar eta^2).
    auto contrast = [&](double nbar) { return std::exp(-nbar * ex2) * std::exp(-nbar * ratio * ey2); };

    auto objective_tol = [&](const std::vector<double>& x, double tail) {
        const double rabi = x[0];
        const double nbar = x[1];
        if (!(rabi > 0.0) || nbar > options.nbar_upper || nbar < -options.nbar_upper) return 1e30;
        const CarrierTerms terms =
            carrier_terms(std::max(nbar, 0.0), ratio, eta_x, eta_y, options.n_max, tail);
        std::vector<double> model;
        carrier_signal_grid(terms, rabi, times, model);
        double chi2 = 0.0;
        for (std::size_t i = 0; i < n_pts; ++i) {
            const double r = values[i] - model[i];
            chi2 += weights[i] * r * r;
        }
        return chi2;
    };
    auto objective = [&](const std::vector<double>& x) { return objective_tol(x, options.tail_tol); };

    // Coarse start scan; contrast-corrected rabi guesses around the peak.
    const double scan_nbar[] = {0.0, 0.5, 1.5, 3.0, 6.0, 10.0, 16.0, 25.0, 40.0, 60.0};
    const double scan_factor[] = {0.85, 1.0, 1.15};
    std::vector<std::pair<double, std::vector<double>>> cells;
    for (double nb : scan_nbar) {
        if (nb > options.nbar_upper) continue;
        for (double f : scan_factor) {
            const std::vector<double> x = {f * peak / (dw * contrast(nb)), nb};
            cells.emplace_back(objective_tol(x, 1e-3), x);
        }
    }
    std::sort(cells.begin(), cells.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SimplexOptions sopt;
    sopt.rel_tol = options.rel_tol;
    sopt.max_iter = options.max_iter;

    SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    int total_evals = static_cast<int>(cells.size());
    const std::size_t n_starts = std::min<std::size_t>(2, cells.size());
    for (std::size_t s = 0; s < n_starts; ++s) {
        const std::vector<double>& x0 = cells[s].second;
        const std::vector<double> step = {0.02 * x0[0], std::max(0.5, 0.15 * x0[1])};
        SimplexResult r = minimize_simplex(objective, x0, step, sopt);
        total_evals += r.evaluations;
        if (r.value < best.value) best = r;
    }

    if (!best.converged)
        throw FitError("fit_carrier_nbar: no start converged; best objective " +
                       std::to_string(best.value));

    FitResult result;
    result.param_names = {"rabi", "nbar_x"};
    result.params = {best.x[0], std::max(best.x[1], 0.0)};
    result.objective = best.value;
    result.converged = true;
    result.evaluations = total_evals;

    // Residuals at the optimum.
    const CarrierTerms terms =
        carrier_terms(result.params[1], ratio, eta_x, eta_y, options.n_max, options.tail_tol);
    std::vector<double> model;
    carrier_signal_grid(terms, result.params[0], times, model);
    result.residuals.resize(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) result.residuals[i] = values[i] - model[i];

    // Covariance from the weighted Gauss-Newton normal matrix with a
    // finite-difference Jacobian.
    const double d_rabi = std::max(1e-6 * result.params[0], 1e-12);
    const double d_nbar = std::max(1e-4 * result.params[1], 1e-4);
    auto model_at = [&](double rabi, double nbar) {
        const CarrierTerms tm =
            carrier_terms(std::max(nbar, 0.0), ratio, eta_x, eta_y, options.n_max, options.tail_tol);
        std::vector<double> out;
        carrier_signal_grid(tm, rabi, times, out);
        return out;
    };
    const std::vector<double> m_r = model_at(result.params[0] + d_rabi, result.params[1]);
    const std::vector<double> m_n = model_at(result.params[0], result.params[1] + d_nbar);
    double a00 = 0.0, a01 = 0.0, a11 = 0.0, g0 = 0.0, g1 = 0.0;
    for (std::size_t i = 0; i < n_pts; ++i) {
        const double jr = (m_r[i] - model[i]) / d_rabi;
        const double jn = (m_n[i] - model[i]) / d_nbar;
        a00 += weights[i] * jr * jr;
        a01 += weights[i] * jr * jn;
        a11 += weights[i] * jn * jn;
        g0 += -2.0 * weights[i] * result.residuals[i] * jr;
        g1 += -2.0 * weights[i] * result.residuals[i] * jn;
    }
    const double det = a00 * a11 - a01 * a01;
    if (det > 0.0) {
        result.sigmas = {std::sqrt(a11 / det), std::sqrt(a00 / det)};
    } else {
        result.sigmas = {std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()};
    }
    // Gradient in log-parameter space so both components are comparable.
    const double gn0 = g0 * result.params[0];
    const double gn1 = g1 * (result.params[1] + 1.0);
    result.gradient_norm = std::sqrt(gn0 * gn0 + gn1 * gn1);
    result.message = "simplex from " + std::to_string(n_starts) + " periodogram-anchored starts";
    return result;
}

FitResult fit_thermal_from_levels(std::span<const LevelObservation> levels) {
    if (levels.size() < 2) throw DomainError("fit_thermal_from_levels: need at least two levels");
    std::set<int> seen;
    bool all_zero = true, weighted = false;
    for (const LevelObservation& o : levels) {
        if (o.level < 0) throw DomainError("fit_thermal_from_levels: negative level");
        if (!(o.value >= 0.0 && o.value <= 1.0))
            throw DomainError("fit_thermal_from_levels: value outside [0, 1]");
        if (!seen.insert(o.level).second)
            throw DomainError("fit_thermal_from_levels: duplicate level");
        if (o.value > 0.0) all_zero = false;
        if (o.sigma > 0.0) weighted = true;
    }
    if (all_zero) throw FitError("fit_thermal_from_levels: all levels zero, no thermal state fits");

    auto thermal_pn = [](double nbar, int n) {
        return std::pow(nbar / (1.0 + nbar), n) / (1.0 + nbar);
    };
    auto chi2 = [&](double nbar) {
        double acc = 0.0;
        for (const LevelObservation& o : levels) {
            const double r = o.value - thermal_pn(nbar, o.level);
            const double w = (weighted && o.sigma > 0.0) ? 1.0 / (o.sigma * o.sigma) : 1.0;
            acc += w * r * r;
        }
        return acc;
    };

    double upper = 10.0;
    for (const LevelObservation& o : levels)
        if (o.level == 0 && o.value > 0.0) upper = std::max(upper, 10.0 * (1.0 / o.value - 1.0));

    ScalarMinimizeOptions sopt;
    sopt.rel_tol = 1e-8;
    int evals = 0;
    const double nbar = minimize_scalar(chi2, 0.0, upper, sopt, &evals);

    FitResult result;
    result.param_names = {"nbar"};
    result.params = {nbar};
    result.objective = chi2(nbar);
    result.evaluations = evals;
    for (const LevelObservation& o : levels)
        result.residuals.push_back(o.value - thermal_pn(nbar, o.level));
    const double sigma = sigma_from_curvature(chi2, nbar, std::max(1e-3 * nbar, 1e-5));
    result.sigmas = {sigma};
    result.converged = true;
    result.message = weighted ? "weighted thermal-level fit" : "unweighted thermal-level fit";
    return result;
}

}  // namespace ionheat
