#include "dodiff/mittag_leffler.hpp"

extern "C" {
#include <quadmath.h>
}

#include <cmath>
#include <limits>
#include <numbers>

#include "dodiff/errors.hpp"

namespace dodiff {

namespace {

struct Estimate {
  double value;
  double error;
};

__float128 recip_gamma_q(__float128 x) {
  // 1/Gamma vanishes at the poles 0, -1, -2, ...
  if (x <= 0 && floorq(x) == x) return 0;
  return 1 / tgammaq(x);
}

Estimate series(double alpha, double beta, double z) {
  const __float128 kTiny = static_cast<__float128>(1e-18) * static_cast<__float128>(1e-18);
  const __float128 zq = z;
  __float128 sum = 0;
  __float128 power = 1;
  __float128 max_term = 0;
  for (int k = 0; k < 4000; ++k) {
    const __float128 arg = static_cast<__float128>(alpha) * k + beta;
    if (arg > 1700) break;
    const __float128 term = power * recip_gamma_q(arg);
    sum += term;
    const __float128 mag = fabsq(term);
    if (mag > max_term) max_term = mag;
    if (k > 4 && mag < kTiny * fabsq(sum) && mag != 0) break;
    if (k > 4 && mag == 0 && power == 0) break;
    power *= zq;
  }
  const double value = static_cast<double>(sum);
  const double error = static_cast<double>(max_term) * 1e-32 +
                       std::abs(value) * std::numeric_limits<double>::epsilon();
  return {value, error};
}

// Truncated where the envelope |z|^-k Gamma(1 - x) / pi of the terms (x =
// beta - alpha k, the reflection bound on |1/Gamma(x)| for x < 0) is smallest.
// Individual terms dip near the poles of Gamma, so they cannot serve as the
// error estimate themselves.
Estimate asymptotic(double alpha, double beta, double z) {
  const double log_az = std::log(std::abs(z));
  double sum = 0.0;
  double best = std::numeric_limits<double>::infinity();
  double error = 0.0;
  for (int k = 1; k < 4000; ++k) {
    const double arg = beta - alpha * k;
    const double sign = (k % 2) ? -1.0 : 1.0;  // sign of z^-k
    double envelope, term;
    if (arg > 0.0) {
      term = -sign * std::exp(-k * log_az) / std::tgamma(arg);
      envelope = std::abs(term);
    } else {
      envelope = std::exp(std::lgamma(1.0 - arg) - k * log_az) / std::numbers::pi;
      term = std::floor(arg) == arg ? 0.0 : -sign * envelope * std::sin(std::numbers::pi * arg);
    }
    error = envelope;
    if (envelope > best) break;  // divergence sets in
    best = envelope;
    sum += term;
    if (envelope < 1e-17 * std::abs(sum)) break;
  }
  return {sum, error + std::abs(sum) * std::numeric_limits<double>::epsilon()};
}

}  // namespace

double mittag_leffler(double alpha, double beta, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("mittag_leffler: alpha must lie in (0, 1]");
  if (!std::isfinite(beta)) throw DomainError("mittag_leffler: beta must be finite");
  if (!(z <= 0.0)) throw DomainError("mittag_leffler: z must be real and <= 0");
  if (alpha == 1.0 && beta == 1.0) return std::exp(z);
  const double az = std::abs(z);
  // For alpha = 1 the asymptotic expansion omits the z^(1-beta) e^z term,
  // which only becomes negligible once |z| is large.
  if (alpha == 1.0 && az <= 50.0) return series(alpha, beta, z).value;
  if (az <= 5.0) {
    // Small alpha: the largest series term grows like exp(|z|^(1/alpha)) and
    // outruns quad precision; the asymptotic series is then the better one.
    const Estimate ser = series(alpha, beta, z);
    if (ser.error <= 1e-14 * std::max(std::abs(ser.value), 1e-300)) return ser.value;
    const Estimate asym = asymptotic(alpha, beta, z);
    return asym.error < ser.error ? asym.value : ser.value;
  }
  const Estimate asym = asymptotic(alpha, beta, z);
  if (asym.error <= 1e-14 * std::max(std::abs(asym.value), 1e-300)) return asym.value;
  const Estimate ser = series(alpha, beta, z);
  return ser.error < asym.error ? ser.value : asym.value;
}

}  // namespace dodiff
