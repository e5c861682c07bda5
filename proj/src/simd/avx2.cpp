#include "dodiff/simd.hpp"

#include <cstddef>
#include <cstdint>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define DODIFF_HAVE_X86 1
#define DODIFF_AVX2 __attribute__((target("avx2,fma")))
#else
#define DODIFF_HAVE_X86 0
#endif

namespace dodiff::simd::avx2 {

#if DODIFF_HAVE_X86

namespace {

DODIFF_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Cephes-style exp: x = k ln2 + r, |r| <= ln2/2, Pade form for e^r, 2^k from
// the exponent bits. Valid for |x| < 708.
DODIFF_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000009e0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, c1, x);
  r = _mm256_fnmadd_pd(k, c2, r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d p = _mm256_fmadd_pd(p0, rr, p1);
  p = _mm256_fmadd_pd(p, rr, p2);
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_fmadd_pd(q0, rr, q1);
  q = _mm256_fmadd_pd(q, rr, q2);
  q = _mm256_fmadd_pd(q, rr, q3);
  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(two, e, one);

  // k + 1.5*2^52 puts k in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ki = _mm256_castpd_si256(_mm256_add_pd(k, magic));
  ki = _mm256_sub_epi64(ki, _mm256_castpd_si256(magic));
  ki = _mm256_add_epi64(ki, _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(ki, 52));
  return _mm256_mul_pd(e, scale);
}

}  // namespace

DODIFF_AVX2 double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i + 4]),
                           _mm256_loadu_pd(&b[i + 4]), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

DODIFF_AVX2 void axpy(double alpha, std::span<const double> x,
                      std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(&y[i], _mm256_fmadd_pd(va, _mm256_loadu_pd(&x[i]),
                                            _mm256_loadu_pd(&y[i])));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

DODIFF_AVX2 ComplexSum exp_moment(std::span<const double> x,
                                  std::span<const double> w, double log_r,
                                  std::span<const double> cos_tab,
                                  std::span<const double> sin_tab) {
  const std::size_t n = x.size();
  const __m256d vl = _mm256_set1_pd(log_r);
  __m256d re = _mm256_setzero_pd();
  __m256d im = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    const __m256d e = exp_pd(_mm256_mul_pd(_mm256_loadu_pd(&x[q]), vl));
    const __m256d m = _mm256_mul_pd(_mm256_loadu_pd(&w[q]), e);
    re = _mm256_fmadd_pd(m, _mm256_loadu_pd(&cos_tab[q]), re);
    im = _mm256_fmadd_pd(m, _mm256_loadu_pd(&sin_tab[q]), im);
  }
  ComplexSum s{hsum(re), hsum(im)};
  if (q < n) {
    const ComplexSum tail = scalar::exp_moment(
        x.subspan(q), w.subspan(q), log_r, cos_tab.subspan(q), sin_tab.subspan(q));
    s.re += tail.re;
    s.im += tail.im;
  }
  return s;
}

DODIFF_AVX2 void resolvent_accumulate(std::span<const double> lambda,
                                      double z_re, double z_im, double g_re,
                                      double g_im, std::span<double> acc) {
  const std::size_t n = lambda.size();
  const __m256d vzr = _mm256_set1_pd(z_re);
  const __m256d vzi2 = _mm256_set1_pd(z_im * z_im);
  const __m256d vgi = _mm256_set1_pd(g_im);
  const __m256d vgz = _mm256_set1_pd(g_re * z_im);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_add_pd(vzr, _mm256_loadu_pd(&lambda[i]));
    const __m256d num = _mm256_fmsub_pd(vgi, d, vgz);
    const __m256d den = _mm256_fmadd_pd(d, d, vzi2);
    _mm256_storeu_pd(&acc[i],
                     _mm256_add_pd(_mm256_loadu_pd(&acc[i]), _mm256_div_pd(num, den)));
  }
  if (i < n)
    scalar::resolvent_accumulate(lambda.subspan(i), z_re, z_im, g_re, g_im,
                                 acc.subspan(i));
}

#else

double dot(std::span<const double> a, std::span<const double> b) {
  return scalar::dot(a, b);
}
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  scalar::axpy(alpha, x, y);
}
ComplexSum exp_moment(std::span<const double> x, std::span<const double> w,
                      double log_r, std::span<const double> cos_tab,
                      std::span<const double> sin_tab) {
  return scalar::exp_moment(x, w, log_r, cos_tab, sin_tab);
}
void resolvent_accumulate(std::span<const double> lambda, double z_re,
                          double z_im, double g_re, double g_im,
                          std::span<double> acc) {
  scalar::resolvent_accumulate(lambda, z_re, z_im, g_re, g_im, acc);
}

#endif

}  // namespace dodiff::simd::avx2
