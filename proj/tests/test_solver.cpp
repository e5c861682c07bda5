#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "dodiff/errors.hpp"
#include "dodiff/mittag_leffler.hpp"
#include "dodiff/solver.hpp"

using namespace dodiff;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> unit(std::size_t n, std::size_t k) {
  std::vector<double> v(n, 0.0);
  v[k - 1] = 1.0;
  return v;
}

Source constant_source(std::size_t mode, double value) {
  Source s;
  s.coefficients = [=](double, std::span<double> f) { f[mode - 1] = value; };
  s.bound = std::abs(value);
  return s;
}

}  // namespace

TEST_CASE("homogeneous propagation") {
  auto p = make_problem(make_constant_weight(), build_exact_dirichlet(kPi, 8), unit(8, 1), {}, 2.0);
  const auto c = propagate_homogeneous(p, 1.0);
  const auto spec = choose_contour(1.0, 1.0, *p.weight, p.kernel);
  CHECK(c[0] == doctest::Approx(eval_En_contour(1, 1.0, *p.basis, *p.weight, spec)).epsilon(1e-14));
  for (std::size_t n = 1; n < 8; ++n) CHECK(c[n] == 0.0);

  p.initial = {};
  for (double v : propagate_homogeneous(p, 1.0)) CHECK(v == 0.0);

  CHECK_THROWS_AS(propagate_homogeneous(p, 0.0), DomainError);
  CHECK_THROWS_AS(propagate_homogeneous(p, 2.5), DomainError);

  auto box = make_problem(make_box_weight(0.5, 0.02), build_exact_dirichlet(kPi, 4), unit(4, 1), {}, 1.0);
  CHECK(std::abs(propagate_homogeneous(box, 1.0)[0] - mittag_leffler(0.5, 1.0, -1.0)) < 2e-2);
}

TEST_CASE("Duhamel term") {
  auto p = make_problem(make_box_weight(0.5, 0.02), build_exact_dirichlet(kPi, 4), {}, {}, 1.0);
  for (double v : duhamel(p, 1.0)) CHECK(v == 0.0);

  // constant unit source in mode 1: t^0.5 E_{0.5,1.5}(-t^0.5) in the constant-order limit
  p.source = constant_source(1, 1.0);
  CHECK(std::abs(duhamel(p, 1.0)[0] - mittag_leffler(0.5, 1.5, -1.0)) < 3e-2);

  // narrow unit-mass hat at tau0 reproduces the kernel
  const double tau0 = 0.4, w = 1e-4;
  auto q = make_problem(make_constant_weight(), build_exact_dirichlet(kPi, 4), {}, {}, 1.0);
  q.source.coefficients = [=](double t, std::span<double> f) {
    const double x = std::abs(t - tau0) / (0.5 * w);
    f[0] = x < 1.0 ? (1.0 - x) * 2.0 / w : 0.0;
  };
  q.source.breakpoints = {tau0 - 0.5 * w, tau0, tau0 + 0.5 * w};
  const auto spec = choose_contour(1.0 - tau0, 1.0, *q.weight, q.kernel);
  const double g = eval_Gn_contour(1, 1.0 - tau0, *q.basis, *q.weight, spec);
  CHECK(std::abs(duhamel(q, 1.0)[0] - g) < 1e-3 * g);
}

TEST_CASE("solve: linearity and plan consistency") {
  const auto basis = build_exact_dirichlet(kPi, 16);
  std::vector<double> u0(16);
  for (std::size_t n = 1; n <= 16; ++n) u0[n - 1] = 1.0 / double(n * n);
  Source src;
  src.coefficients = [](double t, std::span<double> f) {
    f[0] = 1.0;
    f[2] = std::cos(3.0 * t);
  };
  const std::vector<double> times{0.1, 0.35, 0.8, 1.0};
  const auto both = solve(make_problem(make_taper_weight(), basis, u0, src, 1.0), times);
  const auto hom = solve(make_problem(make_taper_weight(), basis, u0, {}, 1.0), times);
  const auto inh = solve(make_problem(make_taper_weight(), basis, {}, src, 1.0), times);
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t n = 1; n <= 16; ++n)
      CHECK(std::abs(both.coefficient(k, n) - hom.coefficient(k, n) - inh.coefficient(k, n)) <= 1e-10);

  const auto prob = make_problem(make_taper_weight(), basis, {}, {}, 1.0);
  const DuhamelPlan plan(prob, times);
  const auto via_plan = plan.apply(src);
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t n = 1; n <= 16; ++n) CHECK(std::abs(via_plan[k * 16 + n - 1] - inh.coefficient(k, n)) <= 1e-12);

  const auto values = both.values(2);
  CHECK(values.size() == basis.grid_points());
  CHECK(values.front() == doctest::Approx(0.0));
  CHECK(both.norm(2, 0.0) == doctest::Approx(fractional_norm(basis, both.at(2), 0.0)));
  CHECK_THROWS_AS(solve(make_problem(make_taper_weight(), basis, u0, {}, 1.0), std::vector<double>{0.0, 0.5}),
                  DomainError);
}

TEST_CASE("near-classical weight tracks the heat semigroup") {
  auto p = make_problem(make_box_weight(0.95, 0.05), build_exact_dirichlet(kPi, 4), unit(4, 1), {}, 2.0);
  const std::vector<double> times{0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
  const auto f = solve(p, times);
  // 10% of the initial amplitude; pointwise the heavier fractional tail is
  // already 25% above e^-t at t = 2, close to the midpoint-order kernel
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    CHECK(std::abs(f.coefficient(k, 1) - std::exp(-t)) < 0.1);
    CHECK(std::abs(f.coefficient(k, 1) - mittag_leffler(0.925, 1.0, -std::pow(t, 0.925))) < 1e-2);
  }
}

TEST_CASE("mode-count stability") {
  std::vector<double> u0{1.0, 0.0, -0.5, 0.25};
  Source src = constant_source(2, 1.0);
  const std::vector<double> times{0.2, 1.0};
  const auto a = solve(make_problem(make_constant_weight(), build_exact_dirichlet(kPi, 16), u0, src, 1.0), times);
  const auto b = solve(make_problem(make_constant_weight(), build_exact_dirichlet(kPi, 32), u0, src, 1.0), times);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK(std::abs(a.norm(k, 0.5) - b.norm(k, 0.5)) < 1e-6);
}

TEST_CASE("norm paths") {
  auto basis = std::make_shared<const SpectralBasis>(build_exact_dirichlet(kPi, 3));
  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(0.1 * k);
  const SolutionField zero(times, std::vector<double>(30, 0.0), basis);
  CHECK(sobolev_norm_path(zero, 0.5, 2.0, 0.9).value == 0.0);

  std::vector<double> c(30, 0.0);
  for (int k = 0; k < 10; ++k) c[3 * k] = 1.0;
  const SolutionField stationary(times, c, basis);
  CHECK(sobolev_norm_path(stationary, 0.0, 1.0, 0.9).value == doctest::Approx(1.0).epsilon(1e-14));

  // kappa = 1/2, p = 1 against direct summation
  auto p = make_problem(make_constant_weight(), build_exact_dirichlet(kPi, 8), {1.0, 0.5, 0.0, 0.25}, {}, 1.0);
  const auto field = solve(p, times);
  double direct = 0.0;
  std::vector<double> nrm;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double s = 0.0;
    for (std::size_t n = 1; n <= 8; ++n) s += p.basis->lambda(n) * std::pow(field.coefficient(k, n), 2);
    nrm.push_back(std::sqrt(s));
  }
  direct = times[0] * nrm[0];
  for (std::size_t k = 1; k < times.size(); ++k) direct += 0.5 * (times[k] - times[k - 1]) * (nrm[k] + nrm[k - 1]);
  const auto path = sobolev_norm_path(field, 0.5, 1.0, 0.9);
  CHECK(path.value == doctest::Approx(direct).epsilon(1e-6));
  CHECK_FALSE(path.outside_estimate_range);
  CHECK(sobolev_norm_path(field, 0.5, 3.0, 0.9).outside_estimate_range);
  CHECK_THROWS_AS(sobolev_norm_path(field, 0.5, 0.5, 0.9), DomainError);
}

TEST_CASE("decay exponents") {
  auto basis = std::make_shared<const SpectralBasis>(build_exact_dirichlet(kPi, 1));
  std::vector<double> times, c;
  for (int k = 0; k <= 12; ++k) {
    times.push_back(1e-4 * std::pow(100.0, k / 12.0));
    c.push_back(std::pow(times.back(), -0.3));
  }
  const SolutionField synthetic(times, c, basis);
  CHECK(estimate_decay_exponent(synthetic, 0.0, 1e-4, 1e-2) == doctest::Approx(-0.3).epsilon(1e-6));
  CHECK_THROWS_AS(estimate_decay_exponent(synthetic, 0.0, 1e-2, 1e-4), DomainError);

  const auto b = build_exact_dirichlet(kPi, 64);
  const auto phi1 = solve(make_problem(make_constant_weight(), b, unit(64, 1), {}, 1e-2), times);
  CHECK(estimate_decay_exponent(phi1, 1.0, 1e-4, 1e-2) >= -0.1);

  std::vector<double> rough(64);
  for (std::size_t n = 1; n <= 64; ++n) rough[n - 1] = std::pow(b.lambda(n), -0.5 - 0.51);
  auto p = make_problem(make_constant_weight(), b, rough, {}, 1e-2);
  p.gamma = 0.5;
  CHECK(estimate_decay_exponent(solve(p, times), 1.0, 1e-4, 1e-2) >= -0.65);

  const std::vector<double> xs{0.0, 1.0, 2.0}, ys{1.0, 3.0, 5.0};
  CHECK(fit_slope(xs, ys) == doctest::Approx(2.0));
}

TEST_CASE("ultraslow decay for a uniform weight") {
  const auto b = build_exact_dirichlet(kPi, 16);
  std::vector<double> times;
  for (int k = 0; k <= 9; ++k) times.push_back(10.0 * std::pow(1000.0, k / 9.0));
  const auto f = solve(make_problem(make_constant_weight(), b, unit(16, 1), {}, 1e4), times);
  double lo = 1e300, hi = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double v = f.norm(k, 0.0) * std::log(times[k]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 5.0);
}

TEST_CASE("problem validation") {
  ProblemSpec p;
  CHECK_THROWS_AS(p.validate(), PreconditionError);
  auto q = make_problem(make_constant_weight(), build_exact_dirichlet(kPi, 2), {1.0}, {}, 1.0);
  CHECK_NOTHROW(q.validate());
  q.initial = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(q.validate(), PreconditionError);
  q.initial = {1.0};
  q.horizon = -1.0;
  CHECK_THROWS_AS(q.validate(), PreconditionError);
  q.horizon = 1.0;
  q.gamma = 1.5;
  CHECK_THROWS_AS(q.validate(), PreconditionError);
}
