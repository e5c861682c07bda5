#pragma once

// Weak solution u(t) = S0(t) u0 + int_0^t S1(t - tau) F(tau) dtau in the
// eigenbasis: c_n(t) = E_n(t) c_n(0) + int_0^t G_n(t - tau) f_n(tau) dtau.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dodiff/kernel.hpp"
#include "dodiff/spectral.hpp"
#include "dodiff/weight.hpp"

namespace dodiff {

/// Source in mode coefficients: fill out[n-1] = f_n(t) for n = 1..out.size().
struct Source {
  std::function<void(double t, std::span<double> out)> coefficients;
  /// sup_t ||F(t)||_{L^2} on [0, T]; informational.
  double bound = 0.0;
  /// Times in (0, T) where f is non-smooth or sharply concentrated; the
  /// Duhamel quadrature splits there.
  std::vector<double> breakpoints;

  bool empty() const { return !coefficients; }
};

struct ProblemSpec {
  std::shared_ptr<const WeightFunction> weight;
  std::shared_ptr<const SpectralBasis> basis;
  std::vector<double> initial;  ///< c_n(0); shorter than N means trailing zeros
  Source source;
  double horizon = 1.0;
  std::optional<double> gamma;  ///< u0 in D(A^gamma) when known
  KernelConfig kernel;
  int duhamel_panels = 32;  ///< uniform panels in v, sigma = t v^grading
  int duhamel_order = 8;
  double grading = 2.0;
  int breakpoint_order = 16;  ///< Gauss points per panel between breakpoints

  std::size_t modes() const { return basis ? basis->modes() : 0; }
  /// Throws PreconditionError on missing pieces or T <= 0.
  void validate() const;
};

/// Builds a ProblemSpec with kernel config derived from the weight.
ProblemSpec make_problem(WeightFunction weight, SpectralBasis basis,
                         std::vector<double> initial, Source source, double horizon);

class SolutionField {
 public:
  SolutionField(std::vector<double> times, std::vector<double> coefficients,
                std::shared_ptr<const SpectralBasis> basis);

  const std::vector<double>& times() const { return times_; }
  std::size_t modes() const { return basis_->modes(); }
  const SpectralBasis& basis() const { return *basis_; }
  std::shared_ptr<const SpectralBasis> basis_ptr() const { return basis_; }
  /// Coefficients at time index k.
  std::span<const double> at(std::size_t k) const;
  double coefficient(std::size_t k, std::size_t n) const { return at(k)[n - 1]; }
  /// u(t_k, x) on the basis grid.
  std::vector<double> values(std::size_t k) const;
  double norm(std::size_t k, double kappa) const;

 private:
  std::vector<double> times_;
  std::vector<double> coefficients_;  // times x modes
  std::shared_ptr<const SpectralBasis> basis_;
};

std::vector<double> propagate_homogeneous(const ProblemSpec& problem, double t);
std::vector<double> duhamel(const ProblemSpec& problem, double t);
/// Parallel over grid points; every grid point must lie in (0, T].
SolutionField solve(const ProblemSpec& problem, std::span<const double> times);

/// Duhamel quadrature with the kernels precomputed for a fixed time grid, so
/// a family of sources costs one kernel sweep. Sources applied later must be
/// smooth between the breakpoints given here.
class DuhamelPlan {
 public:
  DuhamelPlan(const ProblemSpec& problem, std::span<const double> times,
              std::vector<double> breakpoints = {});
  /// Duhamel coefficients, times x modes.
  std::vector<double> apply(const Source& source) const;
  const std::vector<double>& times() const { return times_; }

 private:
  struct Node {
    double tau;
    double weight;
    std::size_t row;  // into kernels_
  };
  std::vector<double> times_;
  std::size_t modes_;
  std::vector<std::vector<Node>> nodes_;  // per time
  std::vector<double> kernels_;           // G_n at each node, rows of modes
};

struct NormPath {
  double value = 0.0;
  /// p >= 1 / (1 - alpha0 (1 - kappa)): outside the range covered by the
  /// regularity estimate; the value is still computed.
  bool outside_estimate_range = false;
};

/// (int_0^T ||u(t)||_{D(A^kappa)}^p dt)^(1/p) by the trapezoid rule on the
/// field's grid; [0, t_0] is covered by a rectangle at t_0 when t_0 > 0.
NormPath sobolev_norm_path(const SolutionField& field, double kappa, double p,
                           double alpha0);

/// Least-squares slope of log ||u(t)||_{D(A^kappa)} against log t over the
/// grid points inside [t_a, t_b].
double estimate_decay_exponent(const SolutionField& field, double kappa, double t_a,
                               double t_b);

/// Slope of the least-squares line through (x_i, y_i).
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace dodiff
