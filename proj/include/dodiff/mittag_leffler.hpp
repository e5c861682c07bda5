#pragma once

namespace dodiff {

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for alpha in (0,1]
/// and real z <= 0.
///
/// |z| <= 5: power series sum z^k / Gamma(alpha k + beta), summed in quad
/// precision so the alternating terms do not cancel away the result (for small
/// alpha the asymptotic series below takes over when it is more accurate).
/// |z| > 5: asymptotic expansion -sum_{k>=1} z^{-k} / Gamma(beta - alpha k),
/// truncated at its smallest term; when that term is too large for the
/// requested accuracy (alpha close to 1) the quad-precision series is used
/// instead if its own error estimate is smaller.
double mittag_leffler(double alpha, double beta, double z);

}  // namespace dodiff
