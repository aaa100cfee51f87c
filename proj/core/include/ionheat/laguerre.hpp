#pragma once

namespace ionheat {

/// Generalized Laguerre polynomial L_n^{(k)}(x), evaluated by the three-term
/// recurrence in n. Stable for the non-negative arguments used throughout
/// (x = |alpha|^2 or eta^2). Throws NumericError if an intermediate value
/// leaves the representable range instead of returning inf/NaN.
double laguerre(int n, int k, double x);

}  // namespace ionheat
