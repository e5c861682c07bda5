#pragma once

// Distributed-order weight density mu on [0,1] and its Laplace symbol
//   w(s) = int_0^1 s^(alpha-1) mu(alpha) dalpha,   s w(s) = int_0^1 s^alpha mu.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dodiff/kvdoc.hpp"

namespace dodiff {

using cplx = std::complex<double>;

enum class WeightKind { constant, box, piecewise };

/// Concentration certificate: mu >= mu(alpha0)/2 > 0 on (alpha0-delta, alpha0),
/// optionally mu = 0 on (alpha1, 1).
struct WeightCertificate {
  double alpha0 = 0.5;
  double delta = 0.25;
  double mu_alpha0 = 1.0;
  std::optional<double> alpha1;
};

class WeightFunction {
 public:
  static constexpr int kDefaultOrder = 64;

  /// Piecewise polynomial: on [breakpoints[i], breakpoints[i+1]) the density is
  /// sum_k coefficients[i][k] * alpha^k. Breakpoints must run from 0 to 1.
  /// Throws PreconditionError naming the violated invariant.
  WeightFunction(std::vector<double> breakpoints,
                 std::vector<std::vector<double>> coefficients,
                 WeightCertificate certificate,
                 WeightKind kind = WeightKind::piecewise,
                 int order = kDefaultOrder);

  WeightKind kind() const { return kind_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<double>>& coefficients() const { return coefficients_; }
  const WeightCertificate& certificate() const { return certificate_; }
  double sup_norm() const { return sup_norm_; }
  int order() const { return order_; }

  /// Same density, different Gauss-Legendre order per piece.
  WeightFunction with_order(int order) const;
  /// mu + eps (certificate value shifted accordingly).
  WeightFunction shifted(double eps) const;

  /// Density value; right limit at breakpoints, left limit at alpha = 1.
  double mu(double alpha) const;

  /// Quadrature nodes alpha_q and weights w_q mu(alpha_q) over the pieces where
  /// mu is not identically zero.
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& node_weights() const { return node_weights_; }

  /// int_0^1 s^(alpha-1) mu dalpha on the principal branch; s off (-inf, 0].
  cplx w(cplx s) const;
  /// s w(s) = int_0^1 s^alpha mu dalpha.
  cplx sw(cplx s) const;
  /// Boundary value of s w(s) from the upper half plane at s = -r, r > 0:
  /// (int r^a cos(pi a) mu, int r^a sin(pi a) mu).
  cplx sw_upper_cut(double r) const;
  /// Same, parametrized by log r (no underflow for tiny r).
  cplx sw_upper_cut_log(double log_r) const;
  /// h(r) = int_0^1 r^alpha mu dalpha, r >= 0.
  double power_moment(double r) const;
  /// int_0^1 e^(ell alpha) mu dalpha in closed form (exact for the piecewise
  /// polynomial density). Used where |log r| is too large for the fixed rule to
  /// resolve the exponential layer at an endpoint.
  cplx moment_closed_form(cplx ell) const;
  static constexpr double kClosedFormLog = 60.0;

  /// int_0^1 r^alpha g(alpha) mu dalpha for a tabulated weight g(alpha_q).
  double power_moment_weighted(double r, const std::vector<double>& g) const;

  /// Fast evaluator of s w(s) for s = r e^{i phi} with phi fixed.
  class Ray {
   public:
    Ray(const WeightFunction& w, double phi);
    double angle() const { return phi_; }
    cplx sw(double r) const;

   private:
    const WeightFunction* weight_;
    double phi_;
    std::vector<double> cos_;
    std::vector<double> sin_;
  };
  Ray ray(double phi) const { return Ray(*this, phi); }

 private:
  void build_rule();
  void validate() const;

  WeightKind kind_;
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> coefficients_;
  WeightCertificate certificate_;
  int order_;
  double sup_norm_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> node_weights_;
  std::vector<double> cut_cos_, cut_sin_, ones_, zeros_;
};

/// mu = value on [0,1]. Any (alpha0, delta) with 0 < delta < alpha0 < 1 is a
/// valid certificate.
WeightFunction make_constant_weight(double value = 1.0, double alpha0 = 0.9,
                                    double delta = 0.45);

/// mu = (1/h) 1_[alpha0-h, alpha0]; certificate (alpha0, h, 1/h).
WeightFunction make_box_weight(double alpha0, double h);

/// mu = 1 on [0, plateau], linear down to 0 at cutoff, 0 on (cutoff, 1];
/// Certificate alpha0 = plateau, delta = plateau / 2, alpha1 = cutoff.
WeightFunction make_taper_weight(double plateau = 0.75, double cutoff = 0.8);

/// True when |arg s| > 3.1, where quadrature of s^alpha loses accuracy.
bool near_cut(cplx s);

double eval_mu(const WeightFunction& w, double alpha);
cplx eval_w(const WeightFunction& w, cplx s);
cplx eval_sw(const WeightFunction& w, cplx s);

/// zeta(r) = (r-1)/log r, zeta(1) = 1.
double zeta_env(double r);
/// vartheta(r) = zeta(r)/r.
double vartheta_env(double r);
/// Inverse of zeta by bisection in log r.
double zeta_inverse(double y);

struct SymbolSample {
  cplx s;
  double lambda;
};

/// Worst relative slack per inequality; negative means violated.
///   resolvent_floor      |s w + lambda| >= C_beta lambda
///   interpolated         lambda^nu |s w|^(1-nu) / |s w + lambda| <= 2/sin beta
///   concentration_floor  |s w + lambda| >= C min(|s|^(a0-d), |s|^a0)
///   sw_envelope          |s w| <= |mu|_inf zeta(|s|)
///   w_envelope           |w| <= |mu|_inf vartheta(|s|)
struct SymbolBoundReport {
  static constexpr double kTolerance = 1e-10;

  std::size_t samples = 0;
  double resolvent_floor = 0.0;
  double interpolated = 0.0;
  double concentration_floor = 0.0;
  double sw_envelope = 0.0;
  double w_envelope = 0.0;
  std::size_t violations_resolvent_floor = 0;
  std::size_t violations_interpolated = 0;
  std::size_t violations_concentration_floor = 0;
  std::size_t violations_envelope = 0;

  std::size_t total_violations() const {
    return violations_resolvent_floor + violations_interpolated +
           violations_concentration_floor + violations_envelope;
  }
};

/// Constant of the concentration lower bound for |arg s| = beta.
double concentration_constant(const WeightFunction& w, double beta);

SymbolBoundReport check_symbol_bounds(const WeightFunction& w,
                                      const std::vector<SymbolSample>& samples);

/// Fixed-seed log-polar sample set: |s| in [1e-6, 1e6], |arg s| <= pi - 1e-3,
/// lambda in [1e-3, 1e4].
std::vector<SymbolSample> random_symbol_samples(std::size_t count,
                                                std::uint64_t seed);

kv::Section weight_to_section(const WeightFunction& w);
WeightFunction weight_from_section(const kv::Section& section);

}  // namespace dodiff
