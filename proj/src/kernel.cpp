#include "dodiff/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#include "dodiff/errors.hpp"
#include "dodiff/parallel.hpp"
#include "dodiff/quadrature.hpp"
#include "dodiff/simd.hpp"

namespace dodiff {

namespace {

constexpr double kPi = std::numbers::pi;

// Below u = log r = -kTailSwitch the spectral integrals are mapped to
// v = -1/u, which turns the 1/u^2 tail of Phi/r (mu(0) > 0) into a bounded
// integrand on a finite interval.
constexpr double kTailSwitch = 30.0;
// Upper truncation r t = 40 leaves a factor e^{-40} in the tail.
constexpr double kUpperRt = 40.0;

double lambda_of(std::size_t n, const SpectralBasis& basis) {
  if (n < 1 || n > basis.modes())
    throw DomainError("mode index " + std::to_string(n) + " outside 1.." +
                      std::to_string(basis.modes()));
  return basis.lambda(n);
}

cplx expst(cplx s, double t) { return std::polar(std::exp(s.real() * t), s.imag() * t); }

using Fn = std::function<double(double)>;

double density_log(double lambda, double log_r, const WeightFunction& w) {
  const cplx m = w.sw_upper_cut_log(log_r);
  const double d = m.real() + lambda;
  const double num = m.imag();
  return num / (d * d + num * num);
}

double adaptive(const Fn& f, double a, double b, double rel_tol) {
  const auto res = quad::integrate_adaptive(f, a, b, rel_tol, 0.0, 30);
  if (!std::isfinite(res.value)) throw NumericError("spectral quadrature produced a non-finite value");
  return res.value;
}

// int_{u_lo}^{u_hi} f(u) du with u_lo possibly -inf.
double integrate_log_range(const Fn& f, double u_lo, double u_hi, double rel_tol) {
  if (!(u_hi > u_lo)) return 0.0;
  double total = 0.0;
  if (u_lo < -kTailSwitch) {
    const double v_a = std::isinf(u_lo) ? 0.0 : -1.0 / u_lo;
    const double v_b = -1.0 / std::min(u_hi, -kTailSwitch);
    const Fn g = [&f](double v) { return f(-1.0 / v) / (v * v); };
    total += adaptive(g, v_a, v_b, rel_tol);
  }
  const double a = std::max(u_lo, -kTailSwitch);
  if (u_hi > a) {
    const int panels = std::max(1, static_cast<int>(std::ceil(u_hi - a)));
    const double width = (u_hi - a) / panels;
    for (int k = 0; k < panels; ++k)
      total += adaptive(f, a + k * width, a + (k + 1) * width, rel_tol);
  }
  return total;
}

// int_{u_from}^inf f(u) du for integrands without an exponential cutoff.
double integrate_to_infinity(const Fn& f, double u_from, double rel_tol,
                             double running) {
  double total = 0.0;
  double u = u_from;
  int quiet = 0;
  while (u < 700.0) {
    const double next = std::floor(u) + 1.0;
    const double piece = adaptive(f, u, next, rel_tol);
    total += piece;
    u = next;
    const double scale = std::abs(total + running);
    quiet = std::abs(piece) <= 1e-17 * scale ? quiet + 1 : 0;
    if (quiet >= 3) return total;
  }
  throw NumericError("divergent quadrature: spectral tail does not decay");
}

Fn spectral_integrand(double lambda, double t, int power, const WeightFunction& w) {
  // r = e^u, dr = r du; the integrand carries r^(1 + power).
  return [lambda, t, power, &w](double u) {
    const double decay = t > 0.0 ? std::exp(-std::exp(u) * t) : 1.0;
    const double jac = power == -1 ? 1.0 : std::exp((1 + power) * u);
    if (decay == 0.0 || jac == 0.0) return 0.0;
    return density_log(lambda, u, w) * jac * decay;
  };
}

double spectral_laplace(double lambda, double t, int power, const WeightFunction& w,
                        double rel_tol) {
  if (!(t > 0.0)) throw DomainError("spectral kernels require t > 0");
  if (!(lambda > 0.0)) throw DomainError("spectral kernels require lambda > 0");
  const Fn f = spectral_integrand(lambda, t, power, w);
  const double u_hi = std::log(kUpperRt / t);
  const double value = integrate_log_range(f, -std::numeric_limits<double>::infinity(),
                                           u_hi, rel_tol);
  // Tail beyond r t = 40: integrand times an e-folding length bounds it.
  const double tail = std::abs(f(u_hi)) / kUpperRt;
  if (!(tail <= 1e-12 * std::abs(value)))
    throw NumericError("spectral truncation certificate unmet at t = " + std::to_string(t));
  return value;
}

}  // namespace

KernelConfig KernelConfig::for_weight(const WeightFunction& w) {
  KernelConfig cfg;
  cfg.eta = 1.0 / (2.0 * w.sup_norm());
  return cfg;
}

void KernelConfig::validate() const {
  if (!(eta > 0.0)) throw PreconditionError("KernelConfig: eta must be positive");
  if (!(theta > kPi / 2 && theta < kPi))
    throw PreconditionError("KernelConfig: theta must lie in (pi/2, pi)");
  if (ray_order < 2 || arc_order < 2)
    throw PreconditionError("KernelConfig: quadrature orders must be >= 2");
  if (!(panel_ratio > 1.0)) throw PreconditionError("KernelConfig: panel ratio must exceed 1");
  if (!(truncation > 0.0 && truncation < 1.0))
    throw PreconditionError("KernelConfig: truncation must lie in (0, 1)");
}

void ContourSpec::validate(double t) const {
  if (!(t > 0.0)) throw DomainError("contour kernels require t > 0");
  if (!(theta > kPi / 2 && theta < kPi))
    throw PreconditionError("contour: theta must lie in (pi/2, pi)");
  if (!(epsilon > 0.0 && epsilon <= cutoff))
    throw PreconditionError("contour: need 0 < epsilon <= R");
  if (ray_order < 2 || arc_order < 2 || !(panel_ratio > 1.0))
    throw PreconditionError("contour: malformed quadrature parameters");
  const double bound = std::exp(cutoff * t * std::cos(theta));
  if (!(bound <= truncation * (1.0 + 1e-9)))
    throw NumericError("contour truncation certificate unmet: e^{R t cos theta} = " +
                       std::to_string(bound));
}

int ContourSpec::ray_panels() const {
  return std::max(1, static_cast<int>(std::ceil(std::log(cutoff / epsilon) /
                                                std::log(panel_ratio) - 1e-12)));
}

ContourSpec choose_contour(double t, double lambda1, const WeightFunction& w,
                           const KernelConfig& cfg) {
  if (!(t > 0.0)) throw DomainError("choose_contour requires t > 0");
  if (!(lambda1 > 0.0)) throw DomainError("choose_contour requires lambda1 > 0");
  (void)w;
  cfg.validate();
  const double el = cfg.eta * lambda1;
  const double eps_symbol = 0.5 * std::min({1.0, el, zeta_inverse(el)});
  ContourSpec spec;
  spec.epsilon = std::min(eps_symbol, 1.0 / t);
  spec.theta = cfg.theta;
  spec.cutoff = std::log(1.0 / cfg.truncation) / (t * std::abs(std::cos(cfg.theta)));
  spec.ray_order = cfg.ray_order;
  spec.panel_ratio = cfg.panel_ratio;
  spec.arc_order = cfg.arc_order;
  spec.residue_tolerance = cfg.residue_tolerance;
  spec.truncation = cfg.truncation;
  return spec;
}

ModeKernels eval_kernels_contour(double t, std::span<const double> lambdas,
                                 const WeightFunction& w, const ContourSpec& spec) {
  spec.validate(t);
  const std::size_t nl = lambdas.size();
  std::vector<double> acc_e(nl, 0.0), acc_g(nl, 0.0);

  // Upper ray s = r e^{i theta}, r from epsilon to R.
  const auto ray = w.ray(spec.theta);
  const cplx dir = std::polar(1.0, spec.theta);
  const auto& rule = quad::gauss_legendre(spec.ray_order);
  const int panels = spec.ray_panels();
  double a = spec.epsilon;
  for (int p = 0; p < panels; ++p) {
    const double b = std::min(a * spec.panel_ratio, spec.cutoff);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = mid + half * rule.nodes[q];
      const cplx s = r * dir;
      const cplx z = ray.sw(r);
      const cplx g = half * rule.weights[q] * expst(s, t) * dir;
      const cplx ge = g * z / s;
      simd::resolvent_accumulate(lambdas, z.real(), z.imag(), g.real(), g.imag(), acc_g);
      simd::resolvent_accumulate(lambdas, z.real(), z.imag(), ge.real(), ge.imag(), acc_e);
    }
    a = b;
  }

  // Upper half arc s = eps e^{i phi}, phi from 0 to theta.
  const auto& arc = quad::gauss_legendre(spec.arc_order);
  const double hmid = 0.5 * spec.theta;
  for (std::size_t q = 0; q < arc.nodes.size(); ++q) {
    const double phi = hmid + hmid * arc.nodes[q];
    const cplx s = std::polar(spec.epsilon, phi);
    const cplx z = w.sw(s);
    const cplx g = hmid * arc.weights[q] * expst(s, t) * cplx(0.0, 1.0) * s;
    const cplx ge = g * z / s;
    simd::resolvent_accumulate(lambdas, z.real(), z.imag(), g.real(), g.imag(), acc_g);
    simd::resolvent_accumulate(lambdas, z.real(), z.imag(), ge.real(), ge.imag(), acc_e);
  }

  ModeKernels out{std::vector<double>(nl), std::vector<double>(nl)};
  for (std::size_t i = 0; i < nl; ++i) {
    out.E[i] = acc_e[i] / kPi;
    out.G[i] = acc_g[i] / kPi;
    if (!std::isfinite(out.E[i]) || !std::isfinite(out.G[i]))
      throw NumericError("contour quadrature produced a non-finite kernel value");
  }

  if (spec.check_residue) {
    for (std::size_t i = 0; i < nl; ++i) {
      const auto res = contour_residue(t, lambdas[i], w, spec);
      const double scale_e = std::max(1.0, std::abs(res.E));
      const double scale_g = std::max(1.0, std::abs(res.G));
      if (std::abs(res.E_imag) > spec.residue_tolerance * scale_e ||
          std::abs(res.G_imag) > spec.residue_tolerance * scale_g)
        throw NumericError("contour quadrature: imaginary residue above tolerance");
    }
  }
  return out;
}

ContourResidue contour_residue(double t, double lambda, const WeightFunction& w,
                               const ContourSpec& spec) {
  spec.validate(t);
  cplx ie = 0.0, ig = 0.0;
  const auto& rule = quad::gauss_legendre(spec.ray_order);
  const int panels = spec.ray_panels();
  for (const double sign : {1.0, -1.0}) {
    const auto ray = w.ray(sign * spec.theta);
    const cplx dir = std::polar(1.0, sign * spec.theta);
    double a = spec.epsilon;
    for (int p = 0; p < panels; ++p) {
      const double b = std::min(a * spec.panel_ratio, spec.cutoff);
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double r = mid + half * rule.nodes[q];
        const cplx s = r * dir;
        const cplx z = ray.sw(r);
        // Lower ray is traversed inward.
        const cplx g = sign * half * rule.weights[q] * expst(s, t) * dir / (z + lambda);
        ig += g;
        ie += g * z / s;
      }
      a = b;
    }
  }
  const auto& arc = quad::gauss_legendre(spec.arc_order);
  for (std::size_t q = 0; q < arc.nodes.size(); ++q) {
    const double phi = spec.theta * arc.nodes[q];
    const cplx s = std::polar(spec.epsilon, phi);
    const cplx z = w.sw(s);
    const cplx g = spec.theta * arc.weights[q] * expst(s, t) * cplx(0.0, 1.0) * s /
                   (z + lambda);
    ig += g;
    ie += g * z / s;
  }
  const cplx to_value = 1.0 / cplx(0.0, 2.0 * kPi);
  const cplx e = ie * to_value, g = ig * to_value;
  return {e.imag(), g.imag(), e.real(), g.real()};
}

double eval_En_contour(std::size_t n, double t, const SpectralBasis& basis,
                       const WeightFunction& w, const ContourSpec& spec) {
  const double lambda = lambda_of(n, basis);
  return eval_kernels_contour(t, std::span(&lambda, 1), w, spec).E[0];
}

double eval_Gn_contour(std::size_t n, double t, const SpectralBasis& basis,
                       const WeightFunction& w, const ContourSpec& spec) {
  const double lambda = lambda_of(n, basis);
  return eval_kernels_contour(t, std::span(&lambda, 1), w, spec).G[0];
}

double spectral_density(double lambda, double r, const WeightFunction& w) {
  if (!(r > 0.0)) throw DomainError("spectral density requires r > 0");
  return density_log(lambda, std::log(r), w);
}

double phi_n(std::size_t n, double r, const SpectralBasis& basis,
             const WeightFunction& w) {
  return spectral_density(lambda_of(n, basis), r, w);
}

double spectral_G(double lambda, double t, const WeightFunction& w, double rel_tol) {
  return spectral_laplace(lambda, t, 0, w, rel_tol) / kPi;
}

double spectral_E(double lambda, double t, const WeightFunction& w, double rel_tol) {
  return lambda * spectral_laplace(lambda, t, -1, w, rel_tol) / kPi;
}

double eval_Gn_spectral(std::size_t n, double t, const SpectralBasis& basis,
                        const WeightFunction& w, double rel_tol) {
  return spectral_G(lambda_of(n, basis), t, w, rel_tol);
}

double dEn_dt(std::size_t n, double t, const SpectralBasis& basis,
              const WeightFunction& w, const ContourSpec& spec) {
  return -lambda_of(n, basis) * eval_Gn_contour(n, t, basis, w, spec);
}

double dEn_dt_fd(std::size_t n, double t, const SpectralBasis& basis,
                 const WeightFunction& w, const KernelConfig& cfg, double rel_step) {
  const double h = rel_step * t;
  const double lambda1 = basis.lambda(1);
  const double ep = eval_En_contour(n, t + h, basis, w, choose_contour(t + h, lambda1, w, cfg));
  const double em = eval_En_contour(n, t - h, basis, w, choose_contour(t - h, lambda1, w, cfg));
  return (ep - em) / (2.0 * h);
}

double threshold_for(double lambda, const WeightFunction& w) {
  if (!(lambda > 0.0)) throw DomainError("threshold requires lambda > 0");
  const double target = 0.5 * lambda;
  const auto h = [&w](double log_a) { return w.power_moment(std::exp(log_a)); };
  double lo = -1.0, hi = 1.0;
  while (h(lo) > target) {
    lo *= 2.0;
    if (lo < -700.0) throw NumericError("threshold: bracket expansion failed (lower)");
  }
  while (h(hi) < target) {
    hi *= 2.0;
    if (hi > 700.0) throw NumericError("threshold: bracket expansion failed (upper)");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = h(mid);
    if (std::abs(v - target) < 1e-10 * lambda * 1e-2) break;
    (v < target ? lo : hi) = mid;
    if (hi - lo < 1e-16) break;
  }
  const double a = std::exp(mid);
  if (!(std::abs(w.power_moment(a) - target) < 1e-10 * lambda))
    throw NumericError("threshold: residual above tolerance");
  return a;
}

double an_threshold(std::size_t n, const SpectralBasis& basis, const WeightFunction& w) {
  return threshold_for(lambda_of(n, basis), w);
}

G0cResult check_g0c(std::size_t n, const SpectralBasis& basis, const WeightFunction& w) {
  const double lambda = lambda_of(n, basis);
  G0cResult out;
  out.a_n = threshold_for(lambda, w);
  const double ua = std::log(out.a_n);
  constexpr double tol = 1e-13;
  // Phi(r)/r dr = Phi(e^u) du.
  const Fn f = [lambda, &w](double u) { return density_log(lambda, u, w); };
  const double inf = std::numeric_limits<double>::infinity();
  out.lower = integrate_log_range(f, -inf, ua, tol);
  out.upper = integrate_to_infinity(f, ua, tol, out.lower);
  const double below = integrate_log_range(f, -inf, 0.0, tol);
  out.unsplit = below + integrate_to_infinity(f, 0.0, tol, below);
  out.product = lambda * (out.lower + out.upper);
  if (!std::isfinite(out.product)) throw NumericError("divergent quadrature in g0c integral");
  return out;
}

std::string method_name(KernelMethod m) {
  return m == KernelMethod::contour ? "contour" : "spectral";
}

KernelTable::KernelTable(std::vector<std::size_t> modes, std::vector<double> times,
                         std::vector<double> E, std::vector<double> G,
                         KernelMethod method)
    : modes_(std::move(modes)), times_(std::move(times)), E_(std::move(E)),
      G_(std::move(G)), method_(method) {
  const std::size_t cells = modes_.size() * times_.size();
  if (E_.size() != cells || G_.size() != cells)
    throw PreconditionError("KernelTable: value arrays do not match modes x times");
  for (std::size_t i = 0; i < cells; ++i)
    if (!std::isfinite(E_[i]) || !std::isfinite(G_[i]))
      throw NumericError("KernelTable: non-finite kernel value");
}

double KernelTable::E(std::size_t row, std::size_t col) const {
  return E_.at(row * times_.size() + col);
}
double KernelTable::G(std::size_t row, std::size_t col) const {
  return G_.at(row * times_.size() + col);
}

KernelTable build_kernel_table(std::span<const std::size_t> modes,
                               std::span<const double> times, const SpectralBasis& basis,
                               const WeightFunction& w, const KernelConfig& cfg,
                               KernelMethod method) {
  const std::size_t nm = modes.size(), nt = times.size();
  std::vector<double> lambdas(nm);
  for (std::size_t i = 0; i < nm; ++i) lambdas[i] = lambda_of(modes[i], basis);
  std::vector<double> E(nm * nt), G(nm * nt);
  if (method == KernelMethod::contour) {
    parallel_for(nt, [&](std::size_t j) {
      const auto spec = choose_contour(times[j], basis.lambda(1), w, cfg);
      const auto k = eval_kernels_contour(times[j], lambdas, w, spec);
      for (std::size_t i = 0; i < nm; ++i) {
        E[i * nt + j] = k.E[i];
        G[i * nt + j] = k.G[i];
      }
    });
  } else {
    parallel_for(nm * nt, [&](std::size_t cell) {
      const std::size_t i = cell / nt, j = cell % nt;
      E[cell] = spectral_E(lambdas[i], times[j], w, cfg.spectral_rel_tol);
      G[cell] = spectral_G(lambdas[i], times[j], w, cfg.spectral_rel_tol);
    });
  }
  return KernelTable({modes.begin(), modes.end()}, {times.begin(), times.end()},
                     std::move(E), std::move(G), method);
}

std::string kernel_csv(const KernelTable& contour, const KernelTable& spectral) {
  if (contour.modes() != spectral.modes() || contour.times() != spectral.times())
    throw PreconditionError("kernel_csv: tables sampled on different grids");
  std::string out = "n,t,E_n,G_n_contour,G_n_spectral,rel_diff\n";
  char line[256];
  for (std::size_t i = 0; i < contour.modes().size(); ++i) {
    for (std::size_t j = 0; j < contour.times().size(); ++j) {
      const double gc = contour.G(i, j), gs = spectral.G(i, j);
      const double rel = std::abs(gc - gs) / std::max(std::abs(gc), 1e-300);
      std::snprintf(line, sizeof line, "%zu,%.10g,%.15e,%.15e,%.15e,%.3e\n",
                    contour.modes()[i], contour.times()[j], contour.E(i, j), gc, gs, rel);
      out += line;
    }
  }
  return out;
}

}  // namespace dodiff
