#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dodiff/errors.hpp"
#include "dodiff/kernel.hpp"
#include "dodiff/mittag_leffler.hpp"

using namespace dodiff;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Independent bisection on (a-1)/log a = y.
double zeta_root(double y) {
  double lo = 1e-12, hi = 1e12;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double z = std::abs(mid - 1.0) < 1e-9 ? 1.0 : (mid - 1.0) / std::log(mid);
    (z < y ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

const SpectralBasis& pi_basis() {
  static const SpectralBasis b = build_exact_dirichlet(kPi, 64);
  return b;
}

}  // namespace

TEST_CASE("contour selection") {
  const auto one = make_constant_weight();
  const auto cfg = KernelConfig::for_weight(one);
  CHECK(cfg.eta == doctest::Approx(0.5));
  CHECK(cfg.theta == doctest::Approx(0.75 * kPi));

  const auto s1 = choose_contour(1.0, 1.0, one, cfg);
  const double expected = 0.5 * std::min({1.0, 0.5, zeta_root(0.5)});
  CHECK(s1.epsilon == doctest::Approx(expected).epsilon(1e-9));
  CHECK(s1.theta == doctest::Approx(0.75 * kPi));
  CHECK(s1.cutoff == doctest::Approx(16.0 * std::log(10.0) / std::abs(std::cos(0.75 * kPi))));
  CHECK(s1.ray_nodes() == s1.ray_panels() * s1.ray_order);

  const auto s100 = choose_contour(100.0, 1.0, one, cfg);
  CHECK(s100.epsilon == doctest::Approx(0.01));
  CHECK(s100.theta == s1.theta);
  CHECK(s100.epsilon <= s100.cutoff);
  CHECK_NOTHROW(s100.validate(100.0));

  auto bad = s1;
  bad.cutoff = 2.0;
  CHECK_THROWS_AS(bad.validate(1.0), NumericError);
  auto bent = s1;
  bent.theta = 0.4 * kPi;
  CHECK_THROWS_AS(bent.validate(1.0), PreconditionError);
  KernelConfig zero = cfg;
  zero.eta = 0.0;
  CHECK_THROWS_AS(zero.validate(), PreconditionError);
}

TEST_CASE("spectral density") {
  const auto one = make_constant_weight();
  const auto& b = pi_basis();
  // N(r) ~ pi / log(r)^2 for mu = 1, so the r -> 0 limit is only logarithmic
  double prev = phi_n(1, 1e-6, b, one);
  for (double r : {1e-12, 1e-50, 1e-200}) {
    const double v = phi_n(1, r, b, one);
    CHECK(v < prev);
    CHECK(v == doctest::Approx(kPi / std::pow(std::log(r), 2)).epsilon(0.1));
    prev = v;
  }
  const double n = 2.0 / kPi;
  CHECK(phi_n(1, 1.0, b, one) == doctest::Approx(n / (1.0 + n * n)).epsilon(1e-12));
  CHECK(phi_n(1, 1.0, b, one) == doctest::Approx(0.45302).epsilon(1e-5));
  for (int k = -12; k <= 12; ++k)
    for (std::size_t m : {1, 7, 64}) CHECK(phi_n(m, std::pow(10.0, k / 2.0), b, one) >= 0.0);
}

TEST_CASE("cross-method agreement and positivity") {
  const auto one = make_constant_weight();
  const auto& b = pi_basis();
  const auto cfg = KernelConfig::for_weight(one);
  for (std::size_t n : {1, 4, 16})
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
      CAPTURE(n);
      CAPTURE(t);
      const auto spec = choose_contour(t, b.lambda(1), one, cfg);
      const double gc = eval_Gn_contour(n, t, b, one, spec);
      const double gs = eval_Gn_spectral(n, t, b, one);
      CHECK(gc > 0.0);
      CHECK(gs > 0.0);
      CHECK(rel(gc, gs) <= 1e-6);
      const double ec = eval_En_contour(n, t, b, one, spec);
      CHECK(rel(ec, spectral_E(b.lambda(n), t, one)) <= 1e-6);
    }
}

TEST_CASE("contour independence and real output") {
  const auto& b = pi_basis();
  for (const auto& w : {make_constant_weight(), make_box_weight(0.5, 0.1), make_taper_weight()}) {
    const auto cfg = KernelConfig::for_weight(w);
    for (std::size_t n : {1, 4, 16})
      for (double t : {0.01, 1.0, 10.0}) {
        auto a = choose_contour(t, b.lambda(1), w, cfg);
        auto c = a;
        c.epsilon = a.epsilon / 2;
        c.theta = 2.0 * kPi / 3.0;
        c.cutoff = std::log(1e16) / (t * std::abs(std::cos(c.theta)));
        CHECK(rel(eval_En_contour(n, t, b, w, a), eval_En_contour(n, t, b, w, c)) <= 1e-8);
        CHECK(rel(eval_Gn_contour(n, t, b, w, a), eval_Gn_contour(n, t, b, w, c)) <= 1e-8);
        const auto res = contour_residue(t, b.lambda(n), w, a);
        CHECK(std::abs(res.E_imag) < 1e-10);
        CHECK(std::abs(res.G_imag) < 1e-10);
        CHECK(rel(res.G, eval_Gn_contour(n, t, b, w, a)) < 1e-12);
      }
  }
}

TEST_CASE("small-time limit of E") {
  const auto& b = pi_basis();
  for (const auto& w : {make_constant_weight(), make_box_weight(0.5, 0.02), make_taper_weight()}) {
    const auto cfg = KernelConfig::for_weight(w);
    double prev = 1.0;
    for (double t : {1e-4, 1e-6, 1e-8, 1e-10}) {
      const double gap = 1.0 - eval_En_contour(1, t, b, w, choose_contour(t, 1.0, w, cfg));
      CHECK(gap > 0.0);
      CHECK(gap < prev);
      prev = gap;
    }
    // 1 - E ~ t^alpha / Gamma(1 + alpha) for the lowest order in the support
    CHECK(prev < 1e-3);
  }
  const auto one = make_constant_weight();
  CHECK(std::abs(eval_En_contour(1, 1e-6, b, one, choose_contour(1e-6, 1.0, one, KernelConfig::for_weight(one))) -
                 1.0) < 1e-3);
}

TEST_CASE("constant-order limit") {
  const auto& b = pi_basis();
  const double e_ml = mittag_leffler(0.5, 1.0, -1.0);
  const double g_ml = mittag_leffler(0.5, 0.5, -1.0);
  double prev_e = 1.0, prev_g = 1.0;
  for (double h : {0.1, 0.05, 0.025, 0.02}) {
    const auto box = make_box_weight(0.5, h);
    const auto spec = choose_contour(1.0, 1.0, box, KernelConfig::for_weight(box));
    const double de = std::abs(eval_En_contour(1, 1.0, b, box, spec) - e_ml);
    const double dg = std::abs(eval_Gn_contour(1, 1.0, b, box, spec) - g_ml);
    CHECK(de < prev_e);
    CHECK(dg < prev_g);
    prev_e = de;
    prev_g = dg;
    const double dgs = std::abs(eval_Gn_spectral(1, 1.0, b, box) - g_ml);
    CHECK(dgs == doctest::Approx(dg).epsilon(1e-6));
  }
  CHECK(prev_e <= 2e-2);
  CHECK(prev_g <= 2e-2);
}

TEST_CASE("derivative identity") {
  const auto one = make_constant_weight();
  const auto& b = pi_basis();
  const auto cfg = KernelConfig::for_weight(one);
  for (std::size_t n : {1, 4})
    for (double t : {0.1, 1.0}) {
      const auto spec = choose_contour(t, b.lambda(1), one, cfg);
      const double d = dEn_dt(n, t, b, one, spec);
      CHECK(d < 0.0);
      CHECK(rel(dEn_dt_fd(n, t, b, one, cfg), d) <= 1e-4);
    }
  // linear in lambda at fixed G: mode 2 of the L = pi/sqrt(2) basis has lambda = 8 = 2 * lambda_2(pi)
  const auto half = build_exact_dirichlet(kPi / std::sqrt(2.0), 4);
  const auto spec = choose_contour(0.5, 1.0, one, cfg);
  CHECK(dEn_dt(2, 0.5, half, one, spec) ==
        doctest::Approx(-2.0 * b.lambda(2) * eval_Gn_contour(2, 0.5, half, one, spec)).epsilon(1e-14));
  for (double t : {1e-4, 0.03, 3.0, 300.0}) CHECK(dEn_dt(3, t, b, one, choose_contour(t, 1.0, one, cfg)) < 0.0);
}

TEST_CASE("decay envelope of G") {
  const auto one = make_constant_weight();
  const auto& b = pi_basis();
  const auto cfg = KernelConfig::for_weight(one);
  const double alpha0 = one.certificate().alpha0;
  const double kappa = 0.5, beta = 0.5 * ((1.0 - alpha0 / 2.0) + 1.0);
  double worst = 0.0;
  for (double t : {1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
    const auto spec = choose_contour(t, 1.0, one, cfg);
    const std::vector<double> lams(b.eigenvalues().begin(), b.eigenvalues().end());
    const auto k = eval_kernels_contour(t, lams, one, spec);
    for (std::size_t n = 0; n < lams.size(); ++n)
      worst = std::max(worst, std::pow(lams[n], kappa) * std::pow(t, beta) * std::abs(k.G[n]));
  }
  CHECK(worst < 10.0);
}

TEST_CASE("thresholds a_n") {
  const auto one = make_constant_weight();
  CHECK(threshold_for(2.0, one) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(threshold_for(4.0, one) == doctest::Approx(zeta_root(2.0)).epsilon(1e-9));
  CHECK(threshold_for(4.0, one) == doctest::Approx(3.5129).epsilon(1e-4));
  const auto taper = make_taper_weight();
  double prev = 0.0;
  for (std::size_t n = 1; n <= 64; n *= 2) {
    const double a = an_threshold(n, pi_basis(), taper);
    CHECK(a > prev);
    CHECK(taper.power_moment(a) == doctest::Approx(pi_basis().lambda(n) / 2).epsilon(1e-10));
    prev = a;
  }
}

TEST_CASE("g0c bound for a cutoff weight") {
  const auto taper = make_taper_weight();
  double lo = 1e300, hi = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto r = check_g0c(n, pi_basis(), taper);
    CHECK(r.lower > 0.0);
    CHECK(r.upper > 0.0);
    CHECK(std::abs(r.lower + r.upper - r.unsplit) <= 1e-8 * r.unsplit);
    lo = std::min(lo, r.product);
    hi = std::max(hi, r.product);
  }
  CHECK(hi / lo < 10.0);
  for (double r : {1e-8, 1e-3, 1.0, 1e3}) CHECK(spectral_density(4.0, r, taper) / r > 0.0);
}

TEST_CASE("kernel tables") {
  const auto one = make_constant_weight();
  const auto& b = pi_basis();
  const auto cfg = KernelConfig::for_weight(one);
  const std::vector<std::size_t> modes{1, 4, 16};
  const std::vector<double> times{0.01, 0.1, 1.0, 10.0};
  const auto c = build_kernel_table(modes, times, b, one, cfg, KernelMethod::contour);
  const auto s = build_kernel_table(modes, times, b, one, cfg, KernelMethod::spectral);
  CHECK(c.method() == KernelMethod::contour);
  CHECK(method_name(s.method()) == "spectral");
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j) {
      CHECK(std::isfinite(c.E(i, j)));
      CHECK(c.G(i, j) > 0.0);
      CHECK(rel(c.G(i, j), s.G(i, j)) <= 1e-6);
      CHECK(c.E(i, j) == doctest::Approx(eval_En_contour(modes[i], times[j], b, one,
                                                         choose_contour(times[j], 1.0, one, cfg)))
                             .epsilon(1e-14));
    }
  const auto csv = kernel_csv(c, s);
  CHECK(csv.rfind("n,t,E_n,G_n_contour,G_n_spectral,rel_diff\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}
