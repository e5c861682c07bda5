#pragma once

// Data-parallel inner loops used by the quadrature-heavy modules.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The variant is selected once at runtime from CPUID and can
// be forced with the environment variable DODIFF_SIMD=scalar|avx2 or with
// set_level(). Both variants are always linked so tests can compare them.

#include <span>
#include <string_view>

namespace dodiff::simd {

enum class Level { scalar, avx2 };

struct ComplexSum {
  double re = 0.0;
  double im = 0.0;
};

bool supported(Level level);
Level active_level();
void set_level(Level level);
std::string_view level_name(Level level);

/// sum_i a_i b_i
double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// sum_q w_q exp(x_q * log_r) * (cos_q, sin_q).
/// Power moments r^x e^{i x phi} of a quadrature rule along a fixed ray; the
/// trigonometric tables are supplied by the caller. Requires |x_q log_r| < 700.
ComplexSum exp_moment(std::span<const double> x, std::span<const double> w,
                      double log_r, std::span<const double> cos_tab,
                      std::span<const double> sin_tab);

/// acc_n += Im( g / (z + lambda_n) ) for every n.
void resolvent_accumulate(std::span<const double> lambda, double z_re,
                          double z_im, double g_re, double g_im,
                          std::span<double> acc);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
ComplexSum exp_moment(std::span<const double> x, std::span<const double> w,
                      double log_r, std::span<const double> cos_tab,
                      std::span<const double> sin_tab);
void resolvent_accumulate(std::span<const double> lambda, double z_re,
                          double z_im, double g_re, double g_im,
                          std::span<double> acc);
}  // namespace scalar

namespace avx2 {
// Only callable when supported(Level::avx2) is true.
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
ComplexSum exp_moment(std::span<const double> x, std::span<const double> w,
                      double log_r, std::span<const double> cos_tab,
                      std::span<const double> sin_tab);
void resolvent_accumulate(std::span<const double> lambda, double z_re,
                          double z_im, double g_re, double g_im,
                          std::span<double> acc);
}  // namespace avx2

}  // namespace dodiff::simd
