#include "doctest.h"

#include <cmath>

#include "ionheat/displaced_fock.hpp"
#include "ionheat/errors.hpp"
#include "oracles.hpp"

using ionheat::displaced_fock_prob;

TEST_SUITE("physics") {

TEST_CASE("zero displacement is the identity") {
    for (int n : {0, 1, 4, 25}) {
        CHECK(displaced_fock_prob(n, n, 0.0) == 1.0);
        CHECK(displaced_fock_prob(n, n + 1, 0.0) == 0.0);
        CHECK(displaced_fock_prob(n, n + 7, 0.0) == 0.0);
    }
}

TEST_CASE("ground state reduces to a Poisson weight") {
    CHECK(displaced_fock_prob(0, 1, 0.01) ==
          doctest::Approx(0.01 * std::exp(-0.01)).epsilon(1e-12));
    const double x = 0.8;
    CHECK(displaced_fock_prob(0, 3, x) ==
          doctest::Approx(x * x * x / 6.0 * std::exp(-x)).epsilon(1e-12));
}

TEST_CASE("matches the matrix-exponential displacement oracle") {
    const double x = 0.8;
    const double ref = ionheat_test::displacement_matrix_prob(2, 4, std::sqrt(x), 60);
    CHECK(displaced_fock_prob(2, 4, x) == doctest::Approx(ref).epsilon(1e-8));

    for (double alpha_sq : {0.1, 0.5, 2.0}) {
        const double alpha = std::sqrt(alpha_sq);
        for (int n : {0, 1, 3, 7, 12}) {
            for (int m : {0, 2, 5, 9, 12}) {
                const double got = displaced_fock_prob(n, m, alpha_sq);
                const double want = ionheat_test::displacement_matrix_prob(n, m, alpha, 90);
                if (want > 1e-12) {
                    CHECK(got == doctest::Approx(want).epsilon(1e-8));
                } else {
                    CHECK(std::abs(got - want) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("symmetry under exchanging the levels") {
    for (double x : {0.02, 0.7, 3.1}) {
        for (int n : {0, 2, 6, 15}) {
            for (int m : {1, 4, 9, 22}) {
                CHECK(displaced_fock_prob(n, m, x) == displaced_fock_prob(m, n, x));
            }
        }
    }
}

TEST_CASE("probabilities over the final level sum to one") {
    for (int n : {0, 3, 10}) {
        for (double x : {0.1, 1.0, 2.0}) {
            double sum = 0.0;
            for (int m = 0; m <= n + 40; ++m) sum += displaced_fock_prob(n, m, x);
            CHECK(sum > 1.0 - 1e-8);
            CHECK(sum <= 1.0 + 1e-10);
        }
    }
}

TEST_CASE("coherent displacement adds exactly its squared magnitude in quanta") {
    for (int n : {0, 2, 8, 20}) {
        for (double x : {0.05, 0.9, 4.0}) {
            double mean = 0.0;
            for (int m = 0; m <= n + 80; ++m) mean += m * displaced_fock_prob(n, m, x);
            CHECK(mean == doctest::Approx(n + x).epsilon(1e-8));
        }
    }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(displaced_fock_prob(-1, 0, 0.1), ionheat::DomainError);
    CHECK_THROWS_AS(displaced_fock_prob(0, -2, 0.1), ionheat::DomainError);
    CHECK_THROWS_AS(displaced_fock_prob(0, 0, -0.1), ionheat::DomainError);
}

}  // TEST_SUITE
