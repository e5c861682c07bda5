#include "dodiff/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace dodiff::quad {

namespace {

Rule build_rule(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    if (n == 1)
      slot = std::make_unique<Rule>(Rule{{0.0}, {2.0}});
    else
      slot = std::make_unique<Rule>(build_rule(n));
  }
  return *slot;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int order) {
  const Rule& rule = gauss_legendre(order);
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(c + h * rule.nodes[i]);
  return s * h;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double rel_tol,
                                  double abs_tol, int max_depth) {
  struct Panel {
    double a, b, estimate;
    int depth;
  };
  AdaptiveResult result;
  const double total_width = std::abs(b - a);
  if (total_width == 0.0) return result;
  std::vector<Panel> stack{{a, b, integrate(f, a, b), 0}};
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double left = integrate(f, p.a, m);
    const double right = integrate(f, m, p.b);
    const double refined = left + right;
    const double diff = std::abs(refined - p.estimate);
    const double tol = std::max(abs_tol * std::abs(p.b - p.a) / total_width,
                                rel_tol * std::abs(refined));
    if (diff <= tol || p.depth >= max_depth || diff == 0.0) {
      if (diff > tol) result.converged = false;
      result.value += refined;
      result.error += diff;
      ++result.panels;
    } else {
      stack.push_back({m, p.b, right, p.depth + 1});
      stack.push_back({p.a, m, left, p.depth + 1});
    }
  }
  return result;
}

}  // namespace dodiff::quad
