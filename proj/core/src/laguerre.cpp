#include "ionheat/laguerre.hpp"

#include <cmath>
#include <string>

#include "ionheat/errors.hpp"

namespace ionheat {

namespace {
constexpr double kOverflowGuard = 1e290;
}

double laguerre(int n, int k, double x) {
    if (n < 0 || k < 0) throw DomainError("laguerre: n and k must be non-negative");
    if (!(x >= 0.0)) throw DomainError("laguerre: x must be non-negative");

    if (n == 0) return 1.0;
    double lm1 = 1.0;            // L_0
    double l = 1.0 + k - x;      // L_1
    for (int i = 1; i < n; ++i) {
        const double next = ((2.0 * i + 1.0 + k - x) * l - (i + k) * lm1) / (i + 1.0);
        lm1 = l;
        l = next;
        if (std::abs(l) > kOverflowGuard || !std::isfinite(l)) {
            throw NumericError("laguerre: value out of range at n=" + std::to_string(i + 1) +
                               ", k=" + std::to_string(k) + ", x=" + std::to_string(x));
        }
    }
    return l;
}

}  // namespace ionheat
