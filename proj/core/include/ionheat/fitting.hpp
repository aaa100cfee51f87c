#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ionheat {

/// Outcome of any of the fitting procedures: point estimates, 1-sigma
/// uncertainties, residuals and convergence diagnostics.
struct FitResult {
    std::vector<std::string> param_names;
    std::vector<double> params;
    std::vector<double> sigmas;
    double objective = 0.0;          // weighted sum of squared residuals at the optimum
    std::vector<double> residuals;   // data - model, in data order
    bool converged = false;
    int evaluations = 0;
    double gradient_norm = 0.0;      // |d objective / d params| at the optimum, where computed
    std::string message;
};

struct ScalarMinimizeOptions {
    double rel_tol = 1e-4;
    int max_iter = 200;
};

/// Bounded scalar minimization: golden-section bracketing with parabolic
/// refinement (Brent). Returns the abscissa of the minimum in [lo, hi].
double minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                       const ScalarMinimizeOptions& options = {}, int* evaluations = nullptr);

/// 1-sigma uncertainty of a single parameter from the local curvature of a
/// chi-square objective: sigma = sqrt(2 / d2chi2). Returns NaN when the
/// numeric curvature is non-positive (flat likelihood).
double sigma_from_curvature(const std::function<double(double)>& chi2, double xmin, double step);

struct SimplexOptions {
    double rel_tol = 1e-6;   // relative spread of objective values across the simplex
    int max_iter = 400;
    std::vector<double>* best_trace = nullptr;  // best objective after each iteration, if wanted
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
    int evaluations = 0;
};

/// Derivative-free Nelder-Mead minimization from a single start point with
/// per-coordinate initial steps.
SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> start, const std::vector<double>& step,
                               const SimplexOptions& options = {});

}  // namespace ionheat
