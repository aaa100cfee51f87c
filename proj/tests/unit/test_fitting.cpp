#include "doctest.h"

#include <cmath>
#include <vector>

#include "ionheat/errors.hpp"
#include "ionheat/fitting.hpp"

using namespace ionheat;

TEST_SUITE("fitting") {

TEST_CASE("scalar minimizer finds an interior quadratic minimum") {
    int evals = 0;
    ScalarMinimizeOptions opt;
    opt.rel_tol = 1e-10;
    const double x = minimize_scalar([](double v) { return (v - 2.0) * (v - 2.0) + 0.5; }, 0.0,
                                     10.0, opt, &evals);
    CHECK(std::abs(x - 2.0) < 1e-8);
    CHECK(evals > 0);
    CHECK(evals < 200);
}

TEST_CASE("scalar minimizer handles a boundary minimum") {
    ScalarMinimizeOptions opt;
    opt.rel_tol = 1e-10;
    const double x = minimize_scalar([](double v) { return v * v; }, 0.0, 5.0, opt);
    CHECK(std::abs(x) < 1e-6);
}

TEST_CASE("scalar minimizer on a non-quadratic well") {
    ScalarMinimizeOptions opt;
    opt.rel_tol = 1e-12;
    const double x =
        minimize_scalar([](double v) { return std::cosh(v - 1.3) + 0.1 * v; }, -4.0, 6.0, opt);
    // d/dv = sinh(v - 1.3) + 0.1 = 0
    const double ref = 1.3 + std::asinh(-0.1);
    CHECK(x == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("curvature sigma of a gaussian chi-square") {
    const double sigma_true = 0.2;
    auto chi2 = [&](double x) { return (x - 3.0) * (x - 3.0) / (sigma_true * sigma_true); };
    CHECK(sigma_from_curvature(chi2, 3.0, 1e-4) == doctest::Approx(sigma_true).epsilon(1e-6));
    // Flat objective has no curvature information.
    CHECK(std::isnan(sigma_from_curvature([](double) { return 1.0; }, 1.0, 1e-4)));
}

TEST_CASE("simplex converges on a 2d quadratic") {
    auto f = [](const std::vector<double>& x) {
        const double a = x[0] - 1.5, b = x[1] + 0.5;
        return 3.0 * a * a + b * b + 0.2 * a * b;
    };
    SimplexOptions opt;
    opt.rel_tol = 1e-12;
    const SimplexResult r = minimize_simplex(f, {8.0, 4.0}, {1.0, 1.0}, opt);
    CHECK(r.converged);
    CHECK(std::abs(r.x[0] - 1.5) < 1e-4);
    CHECK(std::abs(r.x[1] + 0.5) < 1e-4);
}

TEST_CASE("simplex on the banana valley") {
    auto f = [](const std::vector<double>& x) {
        const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    SimplexOptions opt;
    opt.rel_tol = 1e-14;
    opt.max_iter = 4000;
    const SimplexResult r = minimize_simplex(f, {-1.2, 1.0}, {0.5, 0.5}, opt);
    CHECK(r.value < 1e-8);
}

TEST_CASE("simplex best value never regresses across iterations") {
    std::vector<double> trace;
    SimplexOptions opt;
    opt.best_trace = &trace;
    auto f = [](const std::vector<double>& x) {
        return std::sin(3.0 * x[0]) + x[0] * x[0] + (x[1] - 0.3) * (x[1] - 0.3);
    };
    minimize_simplex(f, {2.0, -1.0}, {0.7, 0.7}, opt);
    REQUIRE(trace.size() > 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(minimize_scalar([](double v) { return v; }, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(minimize_simplex([](const std::vector<double>&) { return 0.0; }, {}, {}),
                    DomainError);
    CHECK_THROWS_AS(
        minimize_simplex([](const std::vector<double>&) { return 0.0; }, {1.0}, {0.1, 0.2}),
        DomainError);
}

}  // TEST_SUITE
