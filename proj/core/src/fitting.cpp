#include "ionheat/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ionheat/errors.hpp"

namespace ionheat {

double minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                       const ScalarMinimizeOptions& options, int* evaluations) {
    if (!(hi > lo)) throw DomainError("minimize_scalar: empty interval");

    // Brent's method with the golden-section fallback.
    const double gold = 0.3819660112501051;
    int evals = 0;
    auto eval = [&](double x) {
        ++evals;
        return f(x);
    };

    double a = lo, b = hi;
    double x = a + gold * (b - a), w = x, v = x;
    double fx = eval(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol = options.rel_tol * std::abs(x) + 1e-300;
        if (std::abs(x - m) <= 2.0 * tol - 0.5 * (b - a)) break;

        bool parabolic = false;
        if (std::abs(e) > tol) {
            // Parabola through (v, fv), (w, fw), (x, fx).
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_prev = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < 2.0 * tol || b - u < 2.0 * tol) d = (x < m) ? tol : -tol;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = gold * e;
        }

        const double u = (std::abs(d) >= tol) ? x + d : x + (d > 0.0 ? tol : -tol);
        const double fu = eval(u);

        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    if (evaluations) *evaluations = evals;
    return x;
}

double sigma_from_curvature(const std::function<double(double)>& chi2, double xmin, double step) {
    const double f0 = chi2(xmin);
    const double fp = chi2(xmin + step);
    double second;
    if (xmin - step >= 0.0) {
        const double fm = chi2(xmin - step);
        second = (fp - 2.0 * f0 + fm) / (step * step);
    } else {
        // One-sided stencil for parameters pinned at a lower bound.
        const double fpp = chi2(xmin + 2.0 * step);
        second = (fpp - 2.0 * fp + f0) / (step * step);
    }
    if (!(second > 0.0) || !std::isfinite(second)) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(2.0 / second);
}

SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> start, const std::vector<double>& step,
                               const SimplexOptions& options) {
    const std::size_t n = start.size();
    if (n == 0 || step.size() != n) throw DomainError("minimize_simplex: bad start/step");

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];

    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    SimplexResult result;
    if (options.best_trace) options.best_trace->clear();
    for (int iter = 0; iter < options.max_iter; ++iter) {
        if (options.best_trace)
            options.best_trace->push_back(*std::min_element(vals.begin(), vals.end()));
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

        const double spread = std::abs(vals[worst] - vals[best]);
        const double scale = std::abs(vals[best]) + std::abs(vals[worst]) + 1e-300;
        if (spread <= options.rel_tol * scale) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coeff) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coeff * (pts[worst][j] - centroid[j]);
            return x;
        };

        const std::vector<double> reflected = blend(-1.0);
        const double fr = eval(reflected);
        if (fr < vals[best]) {
            const std::vector<double> expanded = blend(-2.0);
            const double fe = eval(expanded);
            if (fe < fr) { pts[worst] = expanded; vals[worst] = fe; }
            else         { pts[worst] = reflected; vals[worst] = fr; }
        } else if (fr < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = fr;
        } else {
            const std::vector<double> contracted = blend(fr < vals[worst] ? -0.5 : 0.5);
            const double fc = eval(contracted);
            if (fc < std::min(fr, vals[worst])) {
                pts[worst] = contracted;
                vals[worst] = fc;
            } else {
                // Shrink towards the best vertex.
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
                    vals[i] = eval(pts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (vals[i] < vals[best]) best = i;
    result.x = pts[best];
    result.value = vals[best];
    result.evaluations = evals;
    return result;
}

}  // namespace ionheat
