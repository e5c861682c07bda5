#include "dodiff/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dodiff::simd {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Level detect() {
  if (const char* env = std::getenv("DODIFF_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Level::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Level::avx2;
  }
  return cpu_has_avx2() ? Level::avx2 : Level::scalar;
}

std::atomic<Level>& current() {
  static std::atomic<Level> level{detect()};
  return level;
}

}  // namespace

bool supported(Level level) {
  return level == Level::scalar || cpu_has_avx2();
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
  if (!supported(level))
    throw std::invalid_argument("simd level not supported on this CPU");
  current().store(level, std::memory_order_relaxed);
}

std::string_view level_name(Level level) {
  return level == Level::avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active_level() == Level::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (active_level() == Level::avx2)
    avx2::axpy(alpha, x, y);
  else
    scalar::axpy(alpha, x, y);
}

ComplexSum exp_moment(std::span<const double> x, std::span<const double> w,
                      double log_r, std::span<const double> cos_tab,
                      std::span<const double> sin_tab) {
  return active_level() == Level::avx2
             ? avx2::exp_moment(x, w, log_r, cos_tab, sin_tab)
             : scalar::exp_moment(x, w, log_r, cos_tab, sin_tab);
}

void resolvent_accumulate(std::span<const double> lambda, double z_re,
                          double z_im, double g_re, double g_im,
                          std::span<double> acc) {
  if (active_level() == Level::avx2)
    avx2::resolvent_accumulate(lambda, z_re, z_im, g_re, g_im, acc);
  else
    scalar::resolvent_accumulate(lambda, z_re, z_im, g_re, g_im, acc);
}

}  // namespace dodiff::simd
