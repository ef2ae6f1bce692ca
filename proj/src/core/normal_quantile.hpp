#pragma once

namespace tlasso {

/// Standard normal quantile Phi^{-1}(q) for q in (0, 1).
double normal_quantile(double q);

/// Z*_q: the (1 - q)-th percentile of the standard normal, i.e. -Phi^{-1}(q).
/// Evaluated through the lower tail so tiny q keeps full precision.
double upper_normal_quantile(double q);

}  // namespace tlasso
