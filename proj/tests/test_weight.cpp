#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "dodiff/errors.hpp"
#include "dodiff/weight.hpp"

using namespace dodiff;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

// Adaptive Gauss-Kronrod over each piece of mu, real and imaginary parts apart.
cplx gk_integral(const WeightFunction& w, const std::function<cplx(double)>& g) {
  cplx total = 0.0;
  const auto& bp = w.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i], b = bp[i + 1];
    auto f = [&](double x, bool im) {
      const cplx v = g(x) * w.mu(std::min(std::max(x, a), std::nextafter(b, a)));
      return im ? v.imag() : v.real();
    };
    const double re = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x, false); }, a, b, 15, 1e-14);
    const double im = gauss_kronrod<double, 61>::integrate([&](double x) { return f(x, true); }, a, b, 15, 1e-14);
    total += cplx(re, im);
  }
  return total;
}

cplx oracle_w(const WeightFunction& w, cplx s) {
  const cplx ls = std::log(s);
  return gk_integral(w, [&](double a) { return std::exp((a - 1.0) * ls); });
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("eval_mu") {
  const auto one = make_constant_weight();
  CHECK(eval_mu(one, 0.5) == 1.0);
  const WeightFunction box({0.0, 0.25, 0.75, 1.0}, {{0.0}, {2.0}, {0.0}}, {0.5, 0.2, 2.0, std::nullopt});
  CHECK(eval_mu(box, 0.1) == 0.0);
  CHECK(eval_mu(box, 0.5) == 2.0);
  CHECK(eval_mu(box, 0.25) == 2.0);  // right limit
  CHECK(eval_mu(box, 0.75) == 0.0);
  CHECK_THROWS_AS(eval_mu(box, 1.5), DomainError);
  CHECK_THROWS_AS(eval_mu(box, -0.1), DomainError);
}

TEST_CASE("eval_w and eval_sw closed forms") {
  const auto one = make_constant_weight();
  CHECK(std::abs(eval_w(one, 1.0) - cplx(1.0)) < 1e-15);
  CHECK(eval_w(one, 2.0).real() == doctest::Approx(1.0 / (2.0 * std::log(2.0))).epsilon(1e-14));
  CHECK(eval_w(one, 2.0).real() == doctest::Approx(0.7213475).epsilon(1e-7));
  CHECK(eval_sw(one, 2.0).real() == doctest::Approx(1.4426950).epsilon(1e-7));
  CHECK(std::abs(eval_sw(one, 1.0) - cplx(1.0)) < 1e-15);
  for (double r : {0.01, 0.5, 3.0, 1e3}) CHECK(eval_sw(one, r).real() == doctest::Approx((r - 1) / std::log(r)).epsilon(1e-13));
}

TEST_CASE("eval_w against adaptive Gauss-Kronrod") {
  const auto one = make_constant_weight();
  CHECK(rel(eval_w(one, cplx(0, 1)), oracle_w(one, cplx(0, 1))) < 1e-10);
  const cplx s = 10.0 * std::exp(cplx(0, 0.75 * kPi));
  CHECK(rel(eval_sw(one, s), s * oracle_w(one, s)) < 1e-10);

  const auto taper = make_taper_weight();
  const auto box = make_box_weight(0.5, 0.1);
  for (const cplx z : {cplx(0.3, 0.2), cplx(-5, 1), cplx(200, -40), cplx(1e-3, 1e-3)}) {
    CAPTURE(z);
    CHECK(rel(eval_w(taper, z), oracle_w(taper, z)) < 1e-10);
    CHECK(rel(eval_w(box, z), oracle_w(box, z)) < 1e-10);
  }
}

TEST_CASE("branch cut") {
  const auto one = make_constant_weight();
  CHECK_THROWS_AS(eval_w(one, cplx(-1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(eval_sw(one, cplx(0.0, 0.0)), DomainError);
  CHECK(near_cut(std::exp(cplx(0, 3.12))));
  CHECK_FALSE(near_cut(std::exp(cplx(0, 3.0))));
  CHECK(std::isfinite(eval_w(one, std::exp(cplx(0, 3.13))).real()));
}

TEST_CASE("box weight") {
  const auto box = make_box_weight(0.5, 0.1);
  CHECK(box.mu(0.45) == doctest::Approx(10.0));
  CHECK(box.mu(0.3) == 0.0);
  CHECK(box.mu(0.6) == 0.0);
  CHECK(box.sup_norm() == doctest::Approx(10.0));
  CHECK(std::abs(eval_w(box, 1.0) - cplx(1.0)) < 1e-13);
  CHECK(box.certificate().delta == 0.1);
  CHECK(box.certificate().mu_alpha0 == doctest::Approx(10.0));

  const auto box2 = make_box_weight(0.5, 0.05);
  const double r = 4.0;
  const double closed = std::sqrt(r) * (1.0 - std::pow(r, -0.05)) / (0.05 * std::log(r));
  CHECK(eval_sw(box2, r).real() == doctest::Approx(closed).epsilon(1e-13));

  CHECK_THROWS_AS(make_box_weight(0.5, 0.6), DomainError);
  CHECK_THROWS_AS(make_box_weight(1.2, 0.1), DomainError);
}

TEST_CASE("closed-form moments") {
  const auto one = make_constant_weight();
  for (const cplx ell : {cplx(-70.0, kPi), cplx(80.0, 0.0), cplx(-3.0, -2.0), cplx(1.5, 0.0)}) {
    CAPTURE(ell);
    CHECK(rel(one.moment_closed_form(ell), (std::exp(ell) - 1.0) / ell) < 1e-13);
  }
  const auto taper = make_taper_weight();
  for (const cplx ell : {cplx(-70.0, kPi), cplx(-4.0, 3.0), cplx(65.0, -kPi)}) {
    CAPTURE(ell);
    const cplx ref = gk_integral(taper, [&](double a) { return std::exp(ell * a); });
    CHECK(rel(taper.moment_closed_form(ell), ref) < 1e-11);
  }
  // consistent with the quadrature where both are accurate
  const double lr = -10.0;
  const cplx q = taper.sw_upper_cut_log(lr);
  const cplx c = taper.moment_closed_form(cplx(lr, kPi));
  CHECK(rel(q, c) < 1e-12);
  CHECK(taper.power_moment(std::exp(70.0)) == doctest::Approx(taper.moment_closed_form(70.0).real()).epsilon(1e-14));
}

TEST_CASE("zeta and vartheta") {
  CHECK(zeta_env(1.0) == 1.0);
  CHECK(zeta_env(std::numbers::e) == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-14));
  CHECK(vartheta_env(2.0) == doctest::Approx(0.7213475).epsilon(1e-7));
  CHECK(zeta_env(1.0 + 1e-8) == doctest::Approx(1.0 + 0.5e-8).epsilon(1e-15));
  CHECK(zeta_env(1.0 - 1e-7) == doctest::Approx(1.0 - 0.5e-7).epsilon(1e-15));
  double prev_z = 0.0, prev_v = 1e300;
  for (int k = -60; k <= 60; ++k) {
    const double r = std::pow(10.0, k / 10.0);
    CHECK(zeta_env(r) > prev_z);
    CHECK(vartheta_env(r) < prev_v);
    prev_z = zeta_env(r);
    prev_v = vartheta_env(r);
  }
  for (double y : {0.05, 0.5, 1.0, 2.0, 100.0}) CHECK(zeta_env(zeta_inverse(y)) == doctest::Approx(y).epsilon(1e-10));
  CHECK_THROWS_AS(zeta_env(0.0), DomainError);
  CHECK_THROWS_AS(vartheta_env(-1.0), DomainError);
}

TEST_CASE("symbol bounds") {
  const auto one = make_constant_weight();
  const cplx sw2 = eval_sw(one, 2.0);
  CHECK(std::abs(sw2 + 1.0) == doctest::Approx(2.4426950).epsilon(1e-7));
  const cplx s = std::exp(cplx(0, 0.75 * kPi));
  CHECK(std::abs(eval_sw(one, s) + 1.0) >= std::sin(0.75 * kPi) / 2.0);

  const auto rep1 = check_symbol_bounds(one, {{2.0, 1.0}, {s, 1.0}});
  CHECK(rep1.total_violations() == 0);
  CHECK(rep1.resolvent_floor >= 0.0);

  const auto samples = random_symbol_samples(10000, 20240611);
  CHECK(samples.size() == 10000);
  CHECK(samples[17].s == random_symbol_samples(10000, 20240611)[17].s);
  for (const auto& w : {make_constant_weight(), make_box_weight(0.5, 0.25), make_taper_weight()}) {
    const auto rep = check_symbol_bounds(w, samples);
    CHECK(rep.samples == 10000);
    CHECK(rep.total_violations() == 0);
  }
  CHECK(concentration_constant(one, 0.0) > 0.0);
}

TEST_CASE("envelopes on a log-polar grid") {
  const auto box = make_box_weight(0.4, 0.2);
  for (int i = -12; i <= 12; ++i)
    for (double phi : {0.0, 1.0, 2.0, 3.0, -2.5}) {
      const cplx s = std::pow(10.0, i / 2.0) * std::exp(cplx(0, phi));
      CHECK(std::abs(eval_sw(box, s)) <= box.sup_norm() * zeta_env(std::abs(s)) * (1 + 1e-12));
      CHECK(std::abs(eval_w(box, s)) <= box.sup_norm() * vartheta_env(std::abs(s)) * (1 + 1e-12));
    }
}

TEST_CASE("quadrature order doubling") {
  const auto taper = make_taper_weight();
  const auto fine = taper.with_order(128);
  for (int i = -6; i <= 6; ++i)
    for (double phi : {0.0, 1.5, 3.0}) {
      const cplx s = std::pow(10.0, i / 2.0) * std::exp(cplx(0, phi));
      CHECK(rel(eval_w(taper, s), eval_w(fine, s)) < 1e-12);
    }
}

TEST_CASE("invariants are enforced with their names") {
  auto message = [](auto&& make) -> std::string {
    try {
      make();
    } catch (const PreconditionError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message([] { WeightFunction({0, 0.5, 1}, {{1}, {-1}}, {0.4, 0.2, 1, std::nullopt}); })
            .find("non-negativity") != std::string::npos);
  CHECK(message([] { WeightFunction({0, 0.5, 1}, {{1}, {0}}, {0.7, 0.3, 1, std::nullopt}); })
            .find("concentration certificate") != std::string::npos);
  CHECK(message([] { WeightFunction({0, 1}, {{1}}, {0.5, 0.2, 1, 0.8}); }).find("upper cutoff") !=
        std::string::npos);
  CHECK(message([] { WeightFunction({0, 0.5}, {{1}}, {0.4, 0.2, 1, std::nullopt}); }).find("breakpoints") !=
        std::string::npos);
  // the taper satisfies the cutoff condition
  CHECK(make_taper_weight().certificate().alpha1.value() == 0.8);
  CHECK(make_taper_weight().mu(0.9) == 0.0);
  CHECK(make_taper_weight().mu(0.775) == doctest::Approx(0.5));
}

TEST_CASE("shift and serialization") {
  const auto one = make_constant_weight();
  const auto sh = one.shifted(0.1);
  CHECK(sh.mu(0.3) == doctest::Approx(1.1));
  CHECK(sh.sup_norm() == doctest::Approx(1.1));

  for (const auto& w : {make_constant_weight(), make_box_weight(0.5, 0.1), make_taper_weight()}) {
    const auto back = weight_from_section(weight_to_section(w));
    CHECK(back.breakpoints() == w.breakpoints());
    CHECK(back.coefficients() == w.coefficients());
    CHECK(back.certificate().alpha0 == w.certificate().alpha0);
    CHECK(back.certificate().alpha1 == w.certificate().alpha1);
  }
}
