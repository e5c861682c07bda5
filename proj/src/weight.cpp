#include "dodiff/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "dodiff/errors.hpp"
#include "dodiff/quadrature.hpp"
#include "dodiff/simd.hpp"

namespace dodiff {

namespace {

constexpr double kPi = std::numbers::pi;

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

bool all_zero(const std::vector<double>& c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; });
}

[[noreturn]] void invariant_failed(const std::string& name, const std::string& detail) {
  throw PreconditionError("weight invariant '" + name + "' violated: " + detail);
}

std::string str(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void check_off_cut(cplx s) {
  if (s.imag() == 0.0 && s.real() <= 0.0)
    throw DomainError("symbol evaluated on the branch cut (-inf, 0]: s = " +
                      str(s.real()));
}

}  // namespace

WeightFunction::WeightFunction(std::vector<double> breakpoints,
                               std::vector<std::vector<double>> coefficients,
                               WeightCertificate certificate, WeightKind kind,
                               int order)
    : kind_(kind),
      breakpoints_(std::move(breakpoints)),
      coefficients_(std::move(coefficients)),
      certificate_(certificate),
      order_(order) {
  validate();
  build_rule();
}

void WeightFunction::validate() const {
  if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0 ||
      breakpoints_.back() != 1.0)
    invariant_failed("breakpoints", "must start at 0 and end at 1");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i] > breakpoints_[i - 1]))
      invariant_failed("breakpoints", "must be strictly increasing");
  if (coefficients_.size() != breakpoints_.size() - 1)
    invariant_failed("breakpoints", "one coefficient group per piece required");
  for (const auto& c : coefficients_)
    if (c.empty()) invariant_failed("breakpoints", "empty coefficient group");
  if (order_ < 1) invariant_failed("quadrature order", "must be >= 1");

  const auto& cert = certificate_;
  if (!(cert.alpha0 > 0.0 && cert.alpha0 < 1.0))
    invariant_failed("concentration certificate", "alpha0 = " + str(cert.alpha0) +
                                                      " not in (0,1)");
  if (!(cert.delta > 0.0 && cert.delta < cert.alpha0))
    invariant_failed("concentration certificate",
                     "delta = " + str(cert.delta) + " not in (0, alpha0)");
  if (!(cert.mu_alpha0 > 0.0))
    invariant_failed("concentration certificate", "mu(alpha0) must be positive");
  if (cert.alpha1 && !(*cert.alpha1 > cert.alpha0 && *cert.alpha1 < 1.0))
    invariant_failed("upper cutoff", "alpha1 = " + str(*cert.alpha1) +
                                         " not in (alpha0, 1)");

  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double a = static_cast<double>(i) / kSamples;
    const double m = mu(a);
    if (m < 0.0) invariant_failed("non-negativity", "mu(" + str(a) + ") = " + str(m));
  }
  for (std::size_t p = 0; p < coefficients_.size(); ++p) {
    if (horner(coefficients_[p], breakpoints_[p + 1]) < 0.0)
      invariant_failed("non-negativity",
                       "negative left limit at " + str(breakpoints_[p + 1]));
  }

  const double lo = cert.alpha0 - cert.delta;
  for (int i = 1; i < kSamples; ++i) {
    const double a = lo + cert.delta * i / kSamples;
    if (mu(a) < 0.5 * cert.mu_alpha0)
      invariant_failed("concentration certificate",
                       "mu(" + str(a) + ") = " + str(mu(a)) + " < mu(alpha0)/2 = " +
                           str(0.5 * cert.mu_alpha0));
  }
  if (cert.alpha1) {
    const double a1 = *cert.alpha1;
    for (int i = 1; i <= kSamples; ++i) {
      const double a = a1 + (1.0 - a1) * i / kSamples;
      const double m = i == kSamples ? horner(coefficients_.back(), 1.0) : mu(a);
      if (m != 0.0)
        invariant_failed("upper cutoff", "mu(" + str(a) + ") = " + str(m) +
                                             " but must vanish above alpha1");
    }
  }
}

void WeightFunction::build_rule() {
  constexpr int kSupSamples = 512;
  sup_norm_ = 0.0;
  nodes_.clear();
  node_weights_.clear();
  const quad::Rule& rule = quad::gauss_legendre(order_);
  for (std::size_t p = 0; p < coefficients_.size(); ++p) {
    const double a = breakpoints_[p];
    const double b = breakpoints_[p + 1];
    for (int i = 0; i <= kSupSamples; ++i) {
      const double x = a + (b - a) * i / kSupSamples;
      sup_norm_ = std::max(sup_norm_, std::abs(horner(coefficients_[p], x)));
    }
    if (all_zero(coefficients_[p])) continue;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = c + h * rule.nodes[q];
      nodes_.push_back(x);
      node_weights_.push_back(h * rule.weights[q] * horner(coefficients_[p], x));
    }
  }
  const std::size_t n = nodes_.size();
  cut_cos_.resize(n);
  cut_sin_.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    cut_cos_[q] = std::cos(kPi * nodes_[q]);
    cut_sin_[q] = std::sin(kPi * nodes_[q]);
  }
  ones_.assign(n, 1.0);
  zeros_.assign(n, 0.0);
}

WeightFunction WeightFunction::with_order(int order) const {
  return WeightFunction(breakpoints_, coefficients_, certificate_, kind_, order);
}

WeightFunction WeightFunction::shifted(double eps) const {
  auto coeffs = coefficients_;
  for (auto& c : coeffs) c[0] += eps;
  WeightCertificate cert = certificate_;
  cert.mu_alpha0 += eps;
  if (eps != 0.0) cert.alpha1.reset();
  const WeightKind kind = kind_ == WeightKind::constant ? WeightKind::constant
                                                        : WeightKind::piecewise;
  return WeightFunction(breakpoints_, std::move(coeffs), cert, kind, order_);
}

double WeightFunction::mu(double alpha) const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw DomainError("mu evaluated outside [0,1]: alpha = " + str(alpha));
  if (alpha == 1.0) return horner(coefficients_.back(), 1.0);
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), alpha);
  const std::size_t piece = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return horner(coefficients_[piece], alpha);
}

cplx WeightFunction::sw(cplx s) const {
  check_off_cut(s);
  const cplx log_s = std::log(s);
  cplx acc = 0.0;
  for (std::size_t q = 0; q < nodes_.size(); ++q)
    acc += node_weights_[q] * std::exp(nodes_[q] * log_s);
  return acc;
}

cplx WeightFunction::w(cplx s) const { return sw(s) / s; }

cplx WeightFunction::moment_closed_form(cplx ell) const {
  // int_a^b alpha^k e^{ell alpha} dalpha by the upward recursion
  //   J_k = [alpha^k e^{ell alpha}]_a^b / ell - (k / ell) J_{k-1},
  // which is stable while |ell| exceeds the polynomial degree.
  if (std::abs(ell) < 1.0) throw DomainError("moment_closed_form requires |ell| >= 1");
  cplx total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    const auto& c = coefficients_[i];
    bool zero = true;
    for (double v : c) zero = zero && v == 0.0;
    if (zero) continue;
    const double a = breakpoints_[i];
    const double b = breakpoints_[i + 1];
    const cplx ea = std::exp(ell * a);
    const cplx eb = std::exp(ell * b);
    cplx j = (eb - ea) / ell;
    total += c[0] * j;
    double ak = 1.0, bk = 1.0;
    for (std::size_t k = 1; k < c.size(); ++k) {
      ak *= a;
      bk *= b;
      j = (bk * eb - ak * ea) / ell - static_cast<double>(k) / ell * j;
      total += c[k] * j;
    }
  }
  return total;
}

cplx WeightFunction::sw_upper_cut(double r) const {
  if (!(r > 0.0)) throw DomainError("sw_upper_cut requires r > 0");
  return sw_upper_cut_log(std::log(r));
}

cplx WeightFunction::sw_upper_cut_log(double lr) const {
  if (std::abs(lr) > kClosedFormLog)
    return moment_closed_form({lr, 3.14159265358979323846});
  const auto m = simd::exp_moment(nodes_, node_weights_, lr, cut_cos_, cut_sin_);
  return {m.re, m.im};
}

double WeightFunction::power_moment(double r) const {
  if (r < 0.0) throw DomainError("power_moment requires r >= 0");
  if (r == 0.0) return 0.0;
  const double lr = std::log(r);
  if (std::abs(lr) > kClosedFormLog) return moment_closed_form(lr).real();
  return simd::exp_moment(nodes_, node_weights_, lr, ones_, zeros_).re;
}

double WeightFunction::power_moment_weighted(double r,
                                             const std::vector<double>& g) const {
  if (!(r > 0.0)) throw DomainError("power_moment_weighted requires r > 0");
  if (g.size() != nodes_.size())
    throw PreconditionError("power_moment_weighted: table size mismatch");
  return simd::exp_moment(nodes_, node_weights_, std::log(r), g, zeros_).re;
}

WeightFunction::Ray::Ray(const WeightFunction& w, double phi)
    : weight_(&w), phi_(phi), cos_(w.nodes().size()), sin_(w.nodes().size()) {
  for (std::size_t q = 0; q < cos_.size(); ++q) {
    cos_[q] = std::cos(w.nodes()[q] * phi);
    sin_[q] = std::sin(w.nodes()[q] * phi);
  }
}

cplx WeightFunction::Ray::sw(double r) const {
  const auto m = simd::exp_moment(weight_->nodes(), weight_->node_weights(),
                                  std::log(r), cos_, sin_);
  return {m.re, m.im};
}

WeightFunction make_constant_weight(double value, double alpha0, double delta) {
  if (!(value > 0.0)) throw DomainError("constant weight must be positive");
  return WeightFunction({0.0, 1.0}, {{value}}, {alpha0, delta, value, std::nullopt},
                        WeightKind::constant);
}

WeightFunction make_taper_weight(double plateau, double cutoff) {
  if (!(plateau > 0.0 && cutoff > plateau && cutoff < 1.0))
    throw DomainError("taper weight requires 0 < plateau < cutoff < 1");
  const double slope = 1.0 / (cutoff - plateau);
  return WeightFunction({0.0, plateau, cutoff, 1.0},
                        {{1.0}, {cutoff * slope, -slope}, {0.0}},
                        {plateau, 0.5 * plateau, 1.0, cutoff});
}

WeightFunction make_box_weight(double alpha0, double h) {
  if (!(h > 0.0 && h < alpha0 && alpha0 < 1.0))
    throw DomainError("box weight requires 0 < h < alpha0 < 1");
  const double height = 1.0 / h;
  return WeightFunction({0.0, alpha0 - h, alpha0, 1.0}, {{0.0}, {height}, {0.0}},
                        {alpha0, h, height, std::nullopt}, WeightKind::box);
}

bool near_cut(cplx s) { return std::abs(std::arg(s)) > 3.1; }

double eval_mu(const WeightFunction& w, double alpha) { return w.mu(alpha); }
cplx eval_w(const WeightFunction& w, cplx s) { return w.w(s); }
cplx eval_sw(const WeightFunction& w, cplx s) { return w.sw(s); }

double zeta_env(double r) {
  if (!(r > 0.0)) throw DomainError("zeta requires r > 0");
  const double x = r - 1.0;
  if (std::abs(x) < 1e-6) return 1.0 + x / 2.0 - x * x / 12.0 + x * x * x / 24.0;
  return x / std::log(r);
}

double vartheta_env(double r) { return zeta_env(r) / r; }

double zeta_inverse(double y) {
  if (!(y > 0.0)) throw DomainError("zeta_inverse requires y > 0");
  double lo = std::log(1e-12);
  double hi = std::log(1e12);
  // zeta(e^u) tends to 0 as u -> -inf and grows without bound as u -> inf.
  while (zeta_env(std::exp(lo)) > y && lo > -700.0) lo *= 2.0;
  while (zeta_env(std::exp(hi)) < y && hi < 700.0) hi *= 2.0;
  lo = std::max(lo, -700.0);
  hi = std::min(hi, 700.0);
  if (zeta_env(std::exp(lo)) > y || zeta_env(std::exp(hi)) < y)
    throw NumericError("zeta_inverse: target outside representable range");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (zeta_env(std::exp(mid)) < y)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double concentration_constant(const WeightFunction& w, double beta) {
  const auto& c = w.certificate();
  const double scale = 0.5 * c.delta * c.mu_alpha0;
  beta = std::abs(beta);
  if (beta <= kPi / 2) return scale * std::cos(c.alpha0 * kPi / 2);
  return scale * std::min(std::sin((c.alpha0 - c.delta) * kPi / 2),
                          std::sin(c.alpha0 * kPi));
}

SymbolBoundReport check_symbol_bounds(const WeightFunction& w,
                                      const std::vector<SymbolSample>& samples) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  SymbolBoundReport rep;
  rep.resolvent_floor = rep.interpolated = rep.concentration_floor = inf;
  rep.sw_envelope = rep.w_envelope = inf;
  const double tol = SymbolBoundReport::kTolerance;
  const auto& cert = w.certificate();
  for (const auto& sample : samples) {
    if (!(sample.lambda > 0.0)) throw DomainError("symbol bound sample needs lambda > 0");
    const cplx s = sample.s;
    const double lambda = sample.lambda;
    const cplx sw = w.sw(s);
    const double abs_s = std::abs(s);
    const double abs_sw = std::abs(sw);
    const double abs_z = std::abs(sw + lambda);
    const double beta = std::abs(std::arg(s));
    ++rep.samples;

    const double c_beta = beta <= kPi / 2 ? 1.0 : std::sin(beta) / 2.0;
    const double s1 = (abs_z - c_beta * lambda) / (c_beta * lambda);
    rep.resolvent_floor = std::min(rep.resolvent_floor, s1);
    if (s1 < -tol) ++rep.violations_resolvent_floor;

    if (beta > kPi / 2) {
      // lambda^nu |sw|^(1-nu) is monotone in nu, so the endpoints bound it.
      const double bound = 2.0 / std::sin(beta);
      const double ratio = std::max(lambda, abs_sw) / abs_z;
      const double s2 = (bound - ratio) / bound;
      rep.interpolated = std::min(rep.interpolated, s2);
      if (s2 < -tol) ++rep.violations_interpolated;
    }

    const double c3 = concentration_constant(w, beta);
    const double floor3 = c3 * std::min(std::pow(abs_s, cert.alpha0 - cert.delta),
                                        std::pow(abs_s, cert.alpha0));
    const double s3 = (abs_z - floor3) / floor3;
    rep.concentration_floor = std::min(rep.concentration_floor, s3);
    if (s3 < -tol) ++rep.violations_concentration_floor;

    const double env_sw = w.sup_norm() * zeta_env(abs_s);
    const double env_w = w.sup_norm() * vartheta_env(abs_s);
    const double s4 = (env_sw - abs_sw) / env_sw;
    const double s5 = (env_w - abs_sw / abs_s) / env_w;
    rep.sw_envelope = std::min(rep.sw_envelope, s4);
    rep.w_envelope = std::min(rep.w_envelope, s5);
    if (s4 < -tol || s5 < -tol) ++rep.violations_envelope;
  }
  return rep;
}

std::vector<SymbolSample> random_symbol_samples(std::size_t count,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_r(-6.0, 6.0);
  std::uniform_real_distribution<double> arg(-(kPi - 1e-3), kPi - 1e-3);
  std::uniform_real_distribution<double> log_lambda(-3.0, 4.0);
  std::vector<SymbolSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = std::pow(10.0, log_r(rng));
    const double phi = arg(rng);
    const double lambda = std::pow(10.0, log_lambda(rng));
    out.push_back({std::polar(r, phi), lambda});
  }
  return out;
}

kv::Section weight_to_section(const WeightFunction& w) {
  kv::Section sec("weight", 0);
  const auto& cert = w.certificate();
  switch (w.kind()) {
    case WeightKind::constant:
      sec.set("type", "constant");
      sec.set("value", kv::format_number(w.coefficients()[0][0]));
      sec.set("alpha0", kv::format_number(cert.alpha0));
      sec.set("delta", kv::format_number(cert.delta));
      break;
    case WeightKind::box:
      sec.set("type", "box");
      sec.set("alpha0", kv::format_number(cert.alpha0));
      sec.set("h", kv::format_number(cert.delta));
      break;
    case WeightKind::piecewise: {
      sec.set("type", "piecewise");
      sec.set("breakpoints", kv::format_numbers(w.breakpoints()));
      std::string groups;
      for (std::size_t i = 0; i < w.coefficients().size(); ++i) {
        if (i) groups += " | ";
        groups += kv::format_numbers(w.coefficients()[i]);
      }
      sec.set("coefficients", groups);
      sec.set("alpha0", kv::format_number(cert.alpha0));
      sec.set("delta", kv::format_number(cert.delta));
      sec.set("mu_alpha0", kv::format_number(cert.mu_alpha0));
      break;
    }
  }
  if (cert.alpha1) sec.set("alpha1", kv::format_number(*cert.alpha1));
  if (w.order() != WeightFunction::kDefaultOrder)
    sec.set("order", std::to_string(w.order()));
  return sec;
}

WeightFunction weight_from_section(const kv::Section& sec) {
  const std::string type = sec.text("type");
  const int order = static_cast<int>(sec.integer_or("order", WeightFunction::kDefaultOrder));
  std::optional<WeightFunction> w;
  try {
    if (type == "constant") {
      sec.require_only({"type", "value", "alpha0", "delta", "alpha1", "order"});
      w = make_constant_weight(sec.number_or("value", 1.0), sec.number_or("alpha0", 0.9),
                               sec.number_or("delta", 0.45));
    } else if (type == "box") {
      sec.require_only({"type", "alpha0", "h", "alpha1", "order"});
      w = make_box_weight(sec.number("alpha0"), sec.number("h"));
    } else if (type == "piecewise") {
      sec.require_only({"type", "breakpoints", "coefficients", "alpha0", "delta",
                        "mu_alpha0", "alpha1", "order"});
      WeightCertificate cert{sec.number("alpha0"), sec.number("delta"),
                             sec.number("mu_alpha0"), sec.optional_number("alpha1")};
      return WeightFunction(sec.numbers("breakpoints"), sec.number_groups("coefficients"),
                            cert, WeightKind::piecewise, order);
    } else {
      throw kv::ConfigError("[weight] type (line " +
                                std::to_string(sec.entries().at("type").line) +
                                "): expected constant|box|piecewise, got '" + type + "'",
                            sec.entries().at("type").line, "type");
    }
  } catch (const DomainError& e) {
    throw PreconditionError(std::string("weight: ") + e.what());
  }
  WeightCertificate cert = w->certificate();
  cert.alpha1 = sec.optional_number("alpha1");
  return WeightFunction(w->breakpoints(), w->coefficients(), cert, w->kind(), order);
}

}  // namespace dodiff
