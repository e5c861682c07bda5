#pragma once

#include <functional>
#include <vector>

namespace dodiff::quad {

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule; thread safe. Nodes ascending.
const Rule& gauss_legendre(int n);

/// Fixed-order Gauss-Legendre on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 int order = 16);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = true;
};

/// Adaptive bisection with a 16-point Gauss-Legendre panel rule. A panel is
/// accepted once splitting it changes its estimate by less than
/// max(abs_tol * (width / total width), rel_tol * |panel estimate|).
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double rel_tol = 1e-12,
                                  double abs_tol = 0.0, int max_depth = 40);

}  // namespace dodiff::quad
