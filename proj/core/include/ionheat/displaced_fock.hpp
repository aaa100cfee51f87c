#pragma once

namespace ionheat {

/// Probability of finding a coherently displaced number state |n> in |m>,
/// as a function of the squared displacement magnitude alpha_sq = |alpha|^2.
/// Symmetric in (n, m); factorial ratios are evaluated in log space so large
/// level indices stay representable.
double displaced_fock_prob(int n, int m, double alpha_sq);

}  // namespace ionheat
