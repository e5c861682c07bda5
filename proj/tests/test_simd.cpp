#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dodiff/simd.hpp"

using namespace dodiff;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 17, 64, 101};

}  // namespace

TEST_CASE("level selection") {
  CHECK(simd::supported(simd::Level::scalar));
  const auto before = simd::active_level();
  simd::set_level(simd::Level::scalar);
  CHECK(simd::active_level() == simd::Level::scalar);
  CHECK(simd::level_name(simd::Level::scalar) == "scalar");
  CHECK(simd::level_name(simd::Level::avx2) == "avx2");
  simd::set_level(before);
}

TEST_CASE("scalar kernels against plain loops") {
  std::mt19937_64 rng(7);
  const auto a = random_vec(9, rng, -1, 1), b = random_vec(9, rng, -1, 1);
  double ref = 0.0;
  for (int i = 0; i < 9; ++i) ref += a[i] * b[i];
  CHECK(simd::scalar::dot(a, b) == doctest::Approx(ref).epsilon(1e-15));

  auto y = b;
  simd::scalar::axpy(2.5, a, y);
  for (int i = 0; i < 9; ++i) CHECK(y[i] == doctest::Approx(b[i] + 2.5 * a[i]).epsilon(1e-15));

  std::vector<double> lam{1.0, 4.0};
  std::vector<double> acc{0.0, 0.0};
  simd::scalar::resolvent_accumulate(lam, -0.5, 1.0, 2.0, 0.0, acc);
  // Im(2 / (0.5 + i)) = -2 / 1.25
  CHECK(acc[0] == doctest::Approx(-1.6).epsilon(1e-15));
}

TEST_CASE("avx2 kernels match scalar reference") {
  if (!simd::supported(simd::Level::avx2)) {
    MESSAGE("avx2 not available, skipped");
    return;
  }
  std::mt19937_64 rng(11);
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto a = random_vec(n, rng, -2, 2), b = random_vec(n, rng, -2, 2);
    const double ds = simd::scalar::dot(a, b), dv = simd::avx2::dot(a, b);
    CHECK(std::abs(ds - dv) <= 1e-14 * (1.0 + std::abs(ds)));

    auto ys = b, yv = b;
    simd::scalar::axpy(-0.75, a, ys);
    simd::avx2::axpy(-0.75, a, yv);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ys[i] - yv[i]) <= 1e-15 * (1 + std::abs(ys[i])));

    const auto x = random_vec(n, rng, 0, 1), w = random_vec(n, rng, 0, 1);
    std::vector<double> c(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = std::cos(2.0 * x[i]);
      s[i] = std::sin(2.0 * x[i]);
    }
    for (double log_r : {-300.0, -20.0, 0.0, 3.0, 50.0, 600.0}) {
      const auto ms = simd::scalar::exp_moment(x, w, log_r, c, s);
      const auto mv = simd::avx2::exp_moment(x, w, log_r, c, s);
      const double scale = 1e-300 + std::hypot(ms.re, ms.im);
      CHECK(std::abs(ms.re - mv.re) <= 1e-13 * scale);
      CHECK(std::abs(ms.im - mv.im) <= 1e-13 * scale);
    }

    const auto lam = random_vec(n, rng, 1, 1e4);
    std::vector<double> as(n, 0.5), av(n, 0.5);
    simd::scalar::resolvent_accumulate(lam, -3.0, 2.0, 0.3, -1.1, as);
    simd::avx2::resolvent_accumulate(lam, -3.0, 2.0, 0.3, -1.1, av);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(as[i] - av[i]) <= 1e-15 * (1 + std::abs(as[i])));
  }
}

TEST_CASE("dispatch follows the selected level") {
  std::mt19937_64 rng(3);
  const auto a = random_vec(33, rng, -1, 1), b = random_vec(33, rng, -1, 1);
  const auto before = simd::active_level();
  simd::set_level(simd::Level::scalar);
  const double s = simd::dot(a, b);
  CHECK(s == simd::scalar::dot(a, b));
  if (simd::supported(simd::Level::avx2)) {
    simd::set_level(simd::Level::avx2);
    CHECK(simd::dot(a, b) == simd::avx2::dot(a, b));
  }
  simd::set_level(before);
}
