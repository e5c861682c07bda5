#include "dodiff/simd.hpp"

#include <cmath>
#include <cstddef>

namespace dodiff::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

ComplexSum exp_moment(std::span<const double> x, std::span<const double> w,
                      double log_r, std::span<const double> cos_tab,
                      std::span<const double> sin_tab) {
  ComplexSum s;
  for (std::size_t q = 0; q < x.size(); ++q) {
    const double m = w[q] * std::exp(x[q] * log_r);
    s.re += m * cos_tab[q];
    s.im += m * sin_tab[q];
  }
  return s;
}

void resolvent_accumulate(std::span<const double> lambda, double z_re,
                          double z_im, double g_re, double g_im,
                          std::span<double> acc) {
  for (std::size_t n = 0; n < lambda.size(); ++n) {
    const double d_re = z_re + lambda[n];
    acc[n] += (g_im * d_re - g_re * z_im) / (d_re * d_re + z_im * z_im);
  }
}

}  // namespace dodiff::simd::scalar
