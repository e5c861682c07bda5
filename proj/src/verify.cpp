#include "dodiff/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dodiff/errors.hpp"
#include "dodiff/kernel.hpp"
#include "dodiff/parallel.hpp"
#include "dodiff/quadrature.hpp"
#include "dodiff/solver.hpp"
#include "dodiff/weight.hpp"

namespace dodiff {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string comparator_text(Comparator c) {
  switch (c) {
    case Comparator::le: return "<=";
    case Comparator::lt: return "<";
    case Comparator::ge: return ">=";
    case Comparator::gt: return ">";
    case Comparator::info: return "info";
  }
  return "?";
}

std::vector<double> geometric_grid(double a, double b, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(count - 1));
  return t;
}

std::vector<double> uniform_grid(double horizon, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = horizon * static_cast<double>(i + 1) / static_cast<double>(count);
  return t;
}

// Portable uniform [0,1) from a 64-bit engine.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double ratio_band(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

}  // namespace

void ExperimentReport::parameter(std::string key, std::string value) {
  parameters.emplace_back(std::move(key), std::move(value));
}

void ExperimentReport::add(std::string case_id, std::string metric, double value,
                           Comparator cmp, double tolerance) {
  bool pass = std::isfinite(value);
  switch (cmp) {
    case Comparator::le: pass = pass && value <= tolerance; break;
    case Comparator::lt: pass = pass && value < tolerance; break;
    case Comparator::ge: pass = pass && value >= tolerance; break;
    case Comparator::gt: pass = pass && value > tolerance; break;
    case Comparator::info: pass = true; break;
  }
  rows.push_back({std::move(case_id), std::move(metric), value, cmp, tolerance, pass});
}

void ExperimentReport::info(std::string case_id, std::string metric, double value) {
  add(std::move(case_id), std::move(metric), value, Comparator::info, 0.0);
}

std::size_t ExperimentReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const MetricRow& r) { return !r.pass; }));
}

bool ExperimentReport::passed() const { return !inconclusive && failures() == 0; }

std::string ExperimentReport::csv() const {
  std::string out = "case,metric,value,comparator,tolerance,pass\n";
  char line[512];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%s,%s,%.12e,%s,%.6g,%s\n", r.case_id.c_str(),
                  r.metric.c_str(), r.value, comparator_text(r.comparator).c_str(),
                  r.tolerance, r.pass ? "pass" : "FAIL");
    out += line;
  }
  return out;
}

std::string ExperimentReport::summary() const {
  std::string out = "suite " + id + ": " +
                    (inconclusive ? "INCONCLUSIVE" : passed() ? "PASS" : "FAIL") + " (" +
                    std::to_string(rows.size()) + " metrics, " + std::to_string(failures()) +
                    " failures)\n";
  for (const auto& [k, v] : parameters) out += "  " + k + " = " + v + "\n";
  for (const auto& r : rows) {
    out += "  [" + std::string(r.pass ? "pass" : "FAIL") + "] " + r.case_id + " / " + r.metric +
           " = " + fmt(r.value);
    if (r.comparator != Comparator::info)
      out += " (" + comparator_text(r.comparator) + " " + fmt(r.tolerance) + ")";
    out += "\n";
  }
  for (const auto& n : notes) out += "  note: " + n + "\n";
  return out;
}

std::vector<double> scaled_divided_differences(std::span<const double> times,
                                               std::span<const double> values,
                                               std::size_t width, std::size_t max_order) {
  const std::size_t n = times.size();
  if (width == 0 || values.size() != n * width)
    throw PreconditionError("divided differences: values do not match times x width");
  if (n <= max_order) throw PreconditionError("divided differences: grid too short for order");
  auto row_norm = [width](const double* p) {
    double s = 0.0;
    for (std::size_t j = 0; j < width; ++j) s += p[j] * p[j];
    return std::sqrt(s);
  };
  std::vector<double> dd(values.begin(), values.end());
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, row_norm(dd.data() + i * width));
  if (!(scale > 0.0)) return std::vector<double>(max_order + 1, 0.0);
  std::vector<double> out(max_order + 1, 0.0);
  out[0] = 1.0;
  for (std::size_t k = 1; k <= max_order; ++k) {
    const std::size_t rows = n - k;
    for (std::size_t i = 0; i < rows; ++i) {
      const double dt = times[i + k] - times[i];
      for (std::size_t j = 0; j < width; ++j)
        dd[i * width + j] = (dd[(i + 1) * width + j] - dd[i * width + j]) / dt;
      out[k] = std::max(out[k], row_norm(dd.data() + i * width) * std::pow(times[i], k));
    }
    out[k] /= scale;
  }
  return out;
}

ExperimentReport run_decay_suite(const VerifyConfig& cfg) {
  ExperimentReport rep;
  rep.id = "decay";
  rep.parameter("modes", std::to_string(cfg.modes));
  rep.parameter("window", "[1e-4, 1e-2]");
  const auto times = geometric_grid(1e-4, 1e-2, 13);

  {
    auto basis = std::make_shared<const SpectralBasis>(build_exact_dirichlet(kPi, 1));
    std::vector<double> c(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) c[k] = std::pow(times[k], -0.3);
    SolutionField synthetic(times, c, basis);
    const double slope = estimate_decay_exponent(synthetic, 0.0, times.front(), times.back());
    rep.add("synthetic_power_law", "abs(slope + 0.3)", std::abs(slope + 0.3), Comparator::le, 1e-6);
  }

  struct Case {
    std::string name;
    WeightFunction weight;
  };
  const std::vector<Case> cases{{"mu_const", make_constant_weight()},
                                {"mu_box_0.5", make_box_weight(0.5, 0.25)}};
  for (const auto& c : cases) {
    try {
      const double alpha0 = c.weight.certificate().alpha0;
      auto basis = build_exact_dirichlet(kPi, cfg.modes);
      // gamma = 1 data.
      std::vector<double> phi1(cfg.modes, 0.0);
      phi1[0] = 1.0;
      auto prob = make_problem(c.weight, basis, phi1, {}, times.back());
      const auto field = solve(prob, times);
      const double s_da = estimate_decay_exponent(field, 1.0, times.front(), times.back());
      rep.add(c.name + "/phi1", "slope_D(A)", s_da, Comparator::ge, -0.1);

      // ||d_t u|| = (sum lambda_n^2 G_n^2 c_n^2)^(1/2). For weights with a
      // sharp top order the kernel carries a log(1/t) factor whose effect on
      // a finite-window slope is about -1/log(1/t); the bound is asymptotic,
      // so the assertion uses a deeper window and the standard one is reported.
      const std::vector<std::size_t> modes{1};
      auto dt_slope = [&](const std::vector<double>& ts) {
        const auto table = build_kernel_table(modes, ts, basis, c.weight, prob.kernel,
                                              KernelMethod::contour);
        std::vector<double> x, y;
        for (std::size_t k = 0; k < ts.size(); ++k) {
          x.push_back(std::log(ts[k]));
          y.push_back(std::log(basis.lambda(1) * std::abs(table.G(0, k))));
        }
        return fit_slope(x, y);
      };
      const double bound_dt = -(1.0 - alpha0) - 0.15;
      if (c.weight.kind() == WeightKind::constant) {
        rep.add(c.name + "/phi1", "slope_dt", dt_slope(times), Comparator::ge, bound_dt);
      } else {
        rep.info(c.name + "/phi1", "slope_dt", dt_slope(times));
        rep.add(c.name + "/phi1", "slope_dt_window_1e-8_1e-6",
                dt_slope(geometric_grid(1e-8, 1e-6, 13)), Comparator::ge, bound_dt);
      }

      // gamma = 1/2 data: c_n = lambda_n^(-gamma - 0.51).
      std::vector<double> c_half(cfg.modes);
      for (std::size_t n = 1; n <= cfg.modes; ++n) c_half[n - 1] = std::pow(basis.lambda(n), -1.01);
      auto prob_half = make_problem(c.weight, basis, c_half, {}, times.back());
      prob_half.gamma = 0.5;
      const auto field_half = solve(prob_half, times);
      rep.add(c.name + "/gamma_half", "slope_D(A)",
              estimate_decay_exponent(field_half, 1.0, times.front(), times.back()),
              Comparator::ge, 0.5 - 1.0 - 0.15);
    } catch (const std::exception& e) {
      rep.inconclusive = true;
      rep.notes.push_back(c.name + ": fit failed: " + e.what());
    }
  }
  // Ultraslow decay for mu = 1: ||u(t)|| log t stays in a bounded band.
  try {
    const auto late = geometric_grid(10.0, 1e4, 13);
    std::vector<double> phi1(cfg.modes, 0.0);
    phi1[0] = 1.0;
    auto prob = make_problem(make_constant_weight(), build_exact_dirichlet(kPi, cfg.modes), phi1,
                             {}, late.back());
    const auto field = solve(prob, late);
    std::vector<double> scaled;
    for (std::size_t k = 0; k < late.size(); ++k)
      scaled.push_back(field.norm(k, 0.0) * std::log(late[k]));
    rep.info("ultraslow", "norm_log_t_at_10", scaled.front());
    rep.info("ultraslow", "norm_log_t_at_1e4", scaled.back());
    rep.add("ultraslow", "max_over_min_norm_log_t", ratio_band(scaled), Comparator::lt, 5.0);
  } catch (const std::exception& e) {
    rep.inconclusive = true;
    rep.notes.push_back(std::string("ultraslow: ") + e.what());
  }
  rep.notes.push_back(
      "box weight: d_t slope asserted on [1e-8, 1e-6]; on [1e-4, 1e-2] the log(1/t) factor "
      "of the kernel shifts the fitted slope by about -1/log(1/t)");
  return rep;
}

ExperimentReport run_h2_suite(const VerifyConfig& cfg) {
  ExperimentReport rep;
  rep.id = "h2";
  const std::size_t modes = std::min<std::size_t>(cfg.modes, 32);
  const std::size_t band = 8;
  const double horizon = 1.0;
  rep.parameter("weight", "taper 1 on [0,0.75], 0 beyond 0.8");
  rep.parameter("modes", std::to_string(modes));
  rep.parameter("family_size", std::to_string(cfg.family_size));
  rep.parameter("seed", std::to_string(cfg.seed));

  auto prob = make_problem(make_taper_weight(), build_exact_dirichlet(kPi, modes), {}, {}, horizon);
  const auto times = uniform_grid(horizon, 12);
  const DuhamelPlan plan(prob, times);

  // Each source: f_n(t) = a_n + b_n cos(omega_n t + phase_n) for n <= band.
  struct Spec {
    std::string name;
    std::vector<double> a, b, omega, phase;
  };
  std::vector<Spec> family;
  rep.info("zero_source", "skipped", 1.0);
  family.push_back({"phi1_constant", {1.0}, {0.0}, {0.0}, {0.0}});
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.family_size; ++i) {
    Spec s{"random_" + std::to_string(i), {}, {}, {}, {}};
    for (std::size_t n = 0; n < band; ++n) {
      s.a.push_back(2.0 * unit(rng) - 1.0);
      s.b.push_back(2.0 * unit(rng) - 1.0);
      s.omega.push_back(2.0 * kPi * unit(rng));
      s.phase.push_back(2.0 * kPi * unit(rng));
    }
    family.push_back(std::move(s));
  }

  const auto& gl = quad::gauss_legendre(64);
  std::vector<double> ratios;
  for (const auto& s : family) {
    Source src;
    src.coefficients = [&s](double t, std::span<double> f) {
      for (std::size_t n = 0; n < s.a.size() && n < f.size(); ++n)
        f[n] = s.a[n] + s.b[n] * std::cos(s.omega[n] * t + s.phase[n]);
    };
    double f2 = 0.0;
    std::vector<double> f(modes);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      std::fill(f.begin(), f.end(), 0.0);
      src.coefficients(0.5 * horizon * (1.0 + gl.nodes[q]), f);
      double sum = 0.0;
      for (double v : f) sum += v * v;
      f2 += 0.5 * horizon * gl.weights[q] * sum;
    }
    const SolutionField field(times, plan.apply(src), prob.basis);
    const double u_norm = sobolev_norm_path(field, 1.0, 2.0, 0.75).value;
    const double ratio = u_norm / std::sqrt(f2);
    ratios.push_back(ratio);
    rep.info(s.name, "ratio_L2DA_over_L2F", ratio);
  }
  rep.add("family", "max_over_min_ratio", ratio_band(ratios), Comparator::lt, 10.0);
  return rep;
}

ExperimentReport run_stability_suite(const VerifyConfig& cfg) {
  ExperimentReport rep;
  rep.id = "stability";
  const std::size_t modes = std::min<std::size_t>(cfg.modes, 16);
  const double horizon = 1.0, kappa = 0.5, p = 1.0;
  rep.parameter("baseline", "mu = 1, a = 1, q = 0, L = pi");
  rep.parameter("modes", std::to_string(modes));
  rep.parameter("kappa", fmt(kappa));
  rep.parameter("p", fmt(p));
  const auto times = uniform_grid(horizon, 10);

  std::vector<double> u0(modes, 0.0);
  for (std::size_t n = 1; n <= std::min<std::size_t>(modes, 8); ++n) u0[n - 1] = 1.0 / double(n * n);
  Source src;
  src.coefficients = [](double t, std::span<double> f) {
    f[0] = 1.0;
    if (f.size() > 1) f[1] = std::cos(t);
  };

  auto run = [&](const WeightFunction& w, double a, double q) {
    auto prob = make_problem(w, build_exact_dirichlet(kPi, modes, 0, a, q), u0, src, horizon);
    return solve(prob, times);
  };
  // Distance in L^p(0,T; D(A^kappa)) measured with the baseline operator. The
  // perturbed operators have constant coefficients, so their eigenfunctions
  // coincide with the baseline ones and projection is the identity.
  auto distance = [&](const SolutionField& a, const SolutionField& b) {
    std::vector<double> d;
    for (std::size_t k = 0; k < times.size(); ++k)
      for (std::size_t n = 0; n < modes; ++n) d.push_back(a.at(k)[n] - b.at(k)[n]);
    const SolutionField diff(times, d, a.basis_ptr());
    return sobolev_norm_path(diff, kappa, p, 0.9).value;
  };

  const auto mu0 = make_constant_weight();
  const auto base = run(mu0, 1.0, 0.0);
  rep.add("zero_perturbation", "difference", distance(run(mu0, 1.0, 0.0), base), Comparator::le,
          1e-14);

  for (const std::string kind : {"mu", "a", "q", "joint"}) {
    std::vector<double> ratios;
    for (double eps : cfg.stability_eps) {
      const bool dm = kind == "mu" || kind == "joint";
      const bool da = kind == "a" || kind == "joint";
      const bool dq = kind == "q" || kind == "joint";
      const auto pert = run(dm ? mu0.shifted(eps) : mu0, da ? 1.0 + eps : 1.0, dq ? eps : 0.0);
      const double denom = eps * (double(dm) + double(da) + double(dq));
      const double ratio = distance(pert, base) / denom;
      ratios.push_back(ratio);
      rep.info(kind, "ratio_eps_" + fmt(eps), ratio);
    }
    rep.add(kind, "ratio_drift", ratio_band(ratios), Comparator::lt, 2.0);
  }

  {
    const auto box = make_box_weight(0.5, 0.02);
    const double eps = 1e-2;
    const double ratio = distance(run(box, 1.0, eps), run(box, 1.0, 0.0)) / eps;
    rep.add("q_shift_box_0.5", "ratio", ratio, Comparator::lt, 1e6);
  }
  return rep;
}

ExperimentReport run_bound_suite(const VerifyConfig& cfg) {
  ExperimentReport rep;
  rep.id = "bounds";
  rep.parameter("samples", std::to_string(cfg.symbol_samples));
  rep.parameter("seed", std::to_string(cfg.seed));
  const auto samples = random_symbol_samples(cfg.symbol_samples, cfg.seed);
  std::size_t total = 0;
  const std::vector<std::pair<std::string, WeightFunction>> weights{
      {"mu_const", make_constant_weight()},
      {"mu_box_0.5", make_box_weight(0.5, 0.1)},
      {"mu_taper", make_taper_weight()}};
  for (const auto& [name, w] : weights) {
    const auto r = check_symbol_bounds(w, samples);
    rep.add(name, "violations_resolvent_floor", double(r.violations_resolvent_floor), Comparator::le, 0);
    rep.add(name, "violations_interpolated", double(r.violations_interpolated), Comparator::le, 0);
    rep.add(name, "violations_concentration_floor", double(r.violations_concentration_floor),
            Comparator::le, 0);
    rep.add(name, "violations_envelope", double(r.violations_envelope), Comparator::le, 0);
    rep.info(name, "worst_slack_resolvent_floor", r.resolvent_floor);
    rep.info(name, "worst_slack_concentration_floor", r.concentration_floor);
    total += r.total_violations();
  }

  {
    const auto w = make_constant_weight();
    const auto basis = build_exact_dirichlet(kPi, 1);  // lambda_1 = 1
    const double expected = (2.0 / kPi) / (1.0 + std::pow(2.0 / kPi, 2));
    rep.add("spot", "abs(Phi(r=1) - closed form)", std::abs(phi_n(1, 1.0, basis, w) - expected),
            Comparator::le, 1e-10);
    const double a = threshold_for(4.0, w);
    rep.add("spot", "abs(zeta(a_n) - 2)", std::abs(zeta_env(a) - 2.0), Comparator::le, 1e-9);
  }

  {
    const auto w = make_taper_weight();
    const auto basis = build_exact_dirichlet(kPi, cfg.modes);
    std::vector<G0cResult> res(cfg.modes);
    parallel_for(cfg.modes, [&](std::size_t i) { res[i] = check_g0c(i + 1, basis, w); });
    std::vector<double> products;
    double split = 0.0;
    for (const auto& r : res) {
      products.push_back(r.product);
      split = std::max(split, std::abs(r.lower + r.upper - r.unsplit) / r.unsplit);
    }
    rep.info("g0c_taper", "min_product", *std::min_element(products.begin(), products.end()));
    rep.info("g0c_taper", "max_product", *std::max_element(products.begin(), products.end()));
    rep.add("g0c_taper", "max_over_min_product", ratio_band(products), Comparator::lt, 10.0);
    rep.add("g0c_taper", "split_consistency", split, Comparator::le, 1e-8);
  }
  rep.notes.push_back("symbol-bound violations: " + std::to_string(total));
  return rep;
}

ExperimentReport run_smoothness_probe(const VerifyConfig& cfg) {
  ExperimentReport rep;
  rep.id = "smoothness";
  const std::size_t modes = std::min<std::size_t>(cfg.modes, 16);
  const auto times = geometric_grid(0.5, 2.0, 29);
  rep.parameter("grid", "29 geometric points on [0.5, 2]");
  rep.parameter("threshold", fmt(kSmoothnessThreshold));

  {
    std::vector<double> v;
    for (double t : times) v.push_back(1.0 + t - 2.0 * t * t + 0.5 * t * t * t - 0.1 * t * t * t * t);
    const auto dd = scaled_divided_differences(times, v, 1, 5);
    rep.add("polynomial_degree4", "scaled_dd_order5", dd[5], Comparator::le, 1e-6);
  }
  {
    std::vector<double> v;
    for (double t : times) v.push_back(t < 1.0 ? 1.0 : 2.0);
    const auto dd = scaled_divided_differences(times, v, 1, 4);
    rep.add("step_synthetic", "scaled_dd_order4_flagged", dd[4], Comparator::gt, kSmoothnessThreshold);
  }

  auto probe = [&](const std::string& name, const SolutionField& field) {
    std::vector<double> values;
    for (std::size_t k = 0; k < times.size(); ++k)
      values.insert(values.end(), field.at(k).begin(), field.at(k).end());
    const auto dd = scaled_divided_differences(times, values, modes, 4);
    for (std::size_t k = 1; k <= 4; ++k)
      rep.add(name, "scaled_dd_order" + std::to_string(k), dd[k], Comparator::le,
              kSmoothnessThreshold);
  };
  const auto w = make_constant_weight();
  {
    std::vector<double> u0(modes);
    for (std::size_t n = 1; n <= modes; ++n) u0[n - 1] = 1.0 / double(n * n);
    auto prob = make_problem(w, build_exact_dirichlet(kPi, modes), u0, {}, 2.0);
    probe("homogeneous", solve(prob, times));
  }
  {
    Source src;
    src.coefficients = [](double t, std::span<double> f) { f[0] = 1.0 + std::sin(t); };
    auto prob = make_problem(w, build_exact_dirichlet(kPi, modes), {}, src, 2.0);
    probe("smooth_source", solve(prob, times));
  }
  rep.notes.push_back("bounded scaled differences are a smoothness proxy, not a proof of analyticity");
  return rep;
}

std::vector<std::string> suite_names() { return {"decay", "h2", "stability", "bounds", "smoothness"}; }

ExperimentReport run_suite(const std::string& name, const VerifyConfig& cfg) {
  if (name == "decay") return run_decay_suite(cfg);
  if (name == "h2") return run_h2_suite(cfg);
  if (name == "stability") return run_stability_suite(cfg);
  if (name == "bounds") return run_bound_suite(cfg);
  if (name == "smoothness") return run_smoothness_probe(cfg);
  throw DomainError("unknown suite '" + name + "'");
}

}  // namespace dodiff
