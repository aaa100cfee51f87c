#include "ionheat/displaced_fock.hpp"

#include <algorithm>
#include <cmath>

#include "ionheat/errors.hpp"
#include "ionheat/laguerre.hpp"

namespace ionheat {

double displaced_fock_prob(int n, int m, double alpha_sq) {
    if (n < 0 || m < 0) throw DomainError("displaced_fock_prob: negative level");
    if (!(alpha_sq >= 0.0)) throw DomainError("displaced_fock_prob: alpha_sq must be >= 0");

    const int lo = std::min(n, m);
    const int hi = std::max(n, m);
    const int dk = hi - lo;

    if (alpha_sq == 0.0) return n == m ? 1.0 : 0.0;

    const double lag = laguerre(lo, dk, alpha_sq);
    if (lag == 0.0) return 0.0;

    const double log_p = std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0) +
                         dk * std::log(alpha_sq) - alpha_sq + 2.0 * std::log(std::abs(lag));
    return std::exp(log_p);
}

}  // namespace ionheat
