#include "doctest.h"

#include <cmath>

#include "ionheat/errors.hpp"
#include "ionheat/laguerre.hpp"
#include "oracles.hpp"

using ionheat::laguerre;

TEST_SUITE("physics") {

TEST_CASE("laguerre order zero is one") {
    for (int k : {0, 1, 5, 40}) {
        for (double x : {0.0, 0.3, 2.5, 17.0}) {
            CHECK(laguerre(0, k, x) == 1.0);
        }
    }
}

TEST_CASE("laguerre order one closed form") {
    CHECK(laguerre(1, 2, 0.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(laguerre(1, 0, 0.0) == doctest::Approx(1.0));
    CHECK(laguerre(1, 7, 3.25) == doctest::Approx(1.0 + 7.0 - 3.25).epsilon(1e-15));
}

TEST_CASE("laguerre matches direct series summation") {
    CHECK(laguerre(5, 3, 1.7) ==
          doctest::Approx(ionheat_test::laguerre_series(5, 3, 1.7)).epsilon(1e-12));
    for (int n : {2, 4, 7, 12, 19}) {
        for (int k : {0, 1, 3, 10}) {
            for (double x : {0.01, 0.4, 1.3, 3.9}) {
                const double ref = ionheat_test::laguerre_series(n, k, x);
                CHECK(laguerre(n, k, x) == doctest::Approx(ref).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("laguerre argument validation") {
    CHECK_THROWS_AS(laguerre(-1, 0, 0.5), ionheat::DomainError);
    CHECK_THROWS_AS(laguerre(2, -3, 0.5), ionheat::DomainError);
    CHECK_THROWS_AS(laguerre(2, 0, -0.5), ionheat::DomainError);
}

TEST_CASE("laguerre overflow raises instead of returning inf") {
    // L_n^{(k)}(0) = C(n+k, n); this one is far beyond double range.
    CHECK_THROWS_AS(laguerre(600, 600, 0.0), ionheat::NumericError);
}

}  // TEST_SUITE
