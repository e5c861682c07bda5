#include "dodiff/solver.hpp"

#include <algorithm>
#include <cmath>

#include "dodiff/errors.hpp"
#include "dodiff/parallel.hpp"
#include "dodiff/quadrature.hpp"

namespace dodiff {

namespace {

struct Node {
  double sigma;
  double weight;
};

// Quadrature in sigma = t - tau on [0, t]. The first segment is graded toward
// sigma = 0 where G_n(sigma) is weakly singular; later segments are split at
// the source breakpoints.
std::vector<Node> duhamel_nodes(const ProblemSpec& problem, double t) {
  std::vector<double> cuts;
  for (double tau : problem.source.breakpoints)
    if (tau > 0.0 && tau < t) cuts.push_back(t - tau);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.push_back(t);

  std::vector<Node> nodes;
  const auto& graded = quad::gauss_legendre(problem.duhamel_order);
  const double first = cuts.front();
  const double g = problem.grading;
  const double dv = 1.0 / problem.duhamel_panels;
  for (int p = 0; p < problem.duhamel_panels; ++p) {
    const double mid = (p + 0.5) * dv, half = 0.5 * dv;
    for (std::size_t q = 0; q < graded.nodes.size(); ++q) {
      const double v = mid + half * graded.nodes[q];
      nodes.push_back({first * std::pow(v, g),
                       first * g * std::pow(v, g - 1.0) * half * graded.weights[q]});
    }
  }
  const auto& plain = quad::gauss_legendre(problem.breakpoint_order);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t q = 0; q < plain.nodes.size(); ++q)
      nodes.push_back({mid + half * plain.nodes[q], half * plain.weights[q]});
  }
  return nodes;
}

void check_time(const ProblemSpec& problem, double t) {
  if (!(t > 0.0) || t > problem.horizon * (1.0 + 1e-12))
    throw DomainError("evaluation time " + std::to_string(t) + " outside (0, T]");
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

void ProblemSpec::validate() const {
  if (!weight) throw PreconditionError("problem: missing weight");
  if (!basis) throw PreconditionError("problem: missing basis");
  if (!(horizon > 0.0)) throw PreconditionError("problem: horizon T must be positive");
  if (initial.size() > basis->modes())
    throw PreconditionError("problem: more initial coefficients than basis modes");
  if (gamma && !(*gamma > 0.0 && *gamma <= 1.0))
    throw PreconditionError("problem: regularity gamma must lie in (0, 1]");
  if (duhamel_panels < 1 || duhamel_order < 1 || breakpoint_order < 1 || !(grading >= 1.0))
    throw PreconditionError("problem: malformed Duhamel quadrature parameters");
  kernel.validate();
}

ProblemSpec make_problem(WeightFunction weight, SpectralBasis basis,
                         std::vector<double> initial, Source source, double horizon) {
  ProblemSpec p;
  p.kernel = KernelConfig::for_weight(weight);
  p.weight = std::make_shared<const WeightFunction>(std::move(weight));
  p.basis = std::make_shared<const SpectralBasis>(std::move(basis));
  p.initial = std::move(initial);
  p.source = std::move(source);
  p.horizon = horizon;
  p.validate();
  return p;
}

SolutionField::SolutionField(std::vector<double> times, std::vector<double> coefficients,
                             std::shared_ptr<const SpectralBasis> basis)
    : times_(std::move(times)), coefficients_(std::move(coefficients)),
      basis_(std::move(basis)) {
  if (!basis_) throw PreconditionError("SolutionField: missing basis");
  if (coefficients_.size() != times_.size() * basis_->modes())
    throw PreconditionError("SolutionField: coefficient matrix does not match times x modes");
  for (double c : coefficients_)
    if (!std::isfinite(c)) throw NumericError("SolutionField: non-finite coefficient");
}

std::span<const double> SolutionField::at(std::size_t k) const {
  if (k >= times_.size()) throw DomainError("SolutionField: time index out of range");
  return std::span(coefficients_).subspan(k * modes(), modes());
}

std::vector<double> SolutionField::values(std::size_t k) const {
  return synthesize(*basis_, at(k));
}

double SolutionField::norm(std::size_t k, double kappa) const {
  return fractional_norm(*basis_, at(k), kappa);
}

std::vector<double> propagate_homogeneous(const ProblemSpec& problem, double t) {
  check_time(problem, t);
  const std::size_t n = problem.modes();
  std::vector<double> out(n, 0.0);
  if (all_zero(problem.initial)) return out;
  const auto& basis = *problem.basis;
  const auto spec = choose_contour(t, basis.lambda(1), *problem.weight, problem.kernel);
  const auto k = eval_kernels_contour(t, basis.eigenvalues(), *problem.weight, spec);
  for (std::size_t i = 0; i < problem.initial.size(); ++i) out[i] = k.E[i] * problem.initial[i];
  return out;
}

std::vector<double> duhamel(const ProblemSpec& problem, double t) {
  check_time(problem, t);
  const std::size_t n = problem.modes();
  std::vector<double> out(n, 0.0);
  if (problem.source.empty()) return out;
  const auto& basis = *problem.basis;
  std::vector<double> f(n);
  for (const Node& node : duhamel_nodes(problem, t)) {
    std::fill(f.begin(), f.end(), 0.0);
    problem.source.coefficients(t - node.sigma, f);
    if (all_zero(f)) continue;
    const auto spec = choose_contour(node.sigma, basis.lambda(1), *problem.weight,
                                     problem.kernel);
    const auto k = eval_kernels_contour(node.sigma, basis.eigenvalues(), *problem.weight, spec);
    for (std::size_t i = 0; i < n; ++i) out[i] += node.weight * k.G[i] * f[i];
  }
  return out;
}

SolutionField solve(const ProblemSpec& problem, std::span<const double> times) {
  problem.validate();
  for (double t : times) check_time(problem, t);
  const std::size_t n = problem.modes();
  std::vector<double> coeffs(times.size() * n, 0.0);

  if (!all_zero(problem.initial)) {
    std::vector<std::size_t> modes(problem.initial.size());
    for (std::size_t i = 0; i < modes.size(); ++i) modes[i] = i + 1;
    const auto table = build_kernel_table(modes, times, *problem.basis, *problem.weight,
                                          problem.kernel, KernelMethod::contour);
    for (std::size_t k = 0; k < times.size(); ++k)
      for (std::size_t i = 0; i < modes.size(); ++i)
        coeffs[k * n + i] = table.E(i, k) * problem.initial[i];
  }
  if (!problem.source.empty()) {
    parallel_for(times.size(), [&](std::size_t k) {
      const auto d = duhamel(problem, times[k]);
      for (std::size_t i = 0; i < n; ++i) coeffs[k * n + i] += d[i];
    });
  }
  return SolutionField({times.begin(), times.end()}, std::move(coeffs), problem.basis);
}

DuhamelPlan::DuhamelPlan(const ProblemSpec& problem, std::span<const double> times,
                         std::vector<double> breakpoints)
    : times_(times.begin(), times.end()), modes_(problem.modes()) {
  problem.validate();
  ProblemSpec layout = problem;
  layout.source.breakpoints = std::move(breakpoints);
  std::vector<double> sigmas;
  for (double t : times_) {
    check_time(problem, t);
    std::vector<Node> row;
    for (const auto& node : duhamel_nodes(layout, t)) {
      row.push_back({t - node.sigma, node.weight, sigmas.size()});
      sigmas.push_back(node.sigma);
    }
    nodes_.push_back(std::move(row));
  }
  kernels_.assign(sigmas.size() * modes_, 0.0);
  const auto& basis = *problem.basis;
  parallel_for(sigmas.size(), [&](std::size_t j) {
    const auto spec = choose_contour(sigmas[j], basis.lambda(1), *problem.weight, problem.kernel);
    const auto k = eval_kernels_contour(sigmas[j], basis.eigenvalues(), *problem.weight, spec);
    std::copy(k.G.begin(), k.G.end(), kernels_.begin() + static_cast<std::ptrdiff_t>(j * modes_));
  });
}

std::vector<double> DuhamelPlan::apply(const Source& source) const {
  std::vector<double> out(times_.size() * modes_, 0.0);
  if (source.empty()) return out;
  std::vector<double> f(modes_);
  for (std::size_t k = 0; k < times_.size(); ++k) {
    for (const Node& node : nodes_[k]) {
      std::fill(f.begin(), f.end(), 0.0);
      source.coefficients(node.tau, f);
      const double* g = kernels_.data() + node.row * modes_;
      for (std::size_t i = 0; i < modes_; ++i) out[k * modes_ + i] += node.weight * g[i] * f[i];
    }
  }
  return out;
}

NormPath sobolev_norm_path(const SolutionField& field, double kappa, double p,
                           double alpha0) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("norm path: kappa outside [0, 1]");
  if (!(p >= 1.0)) throw DomainError("norm path: p must be >= 1");
  NormPath out;
  out.outside_estimate_range = p >= 1.0 / (1.0 - alpha0 * (1.0 - kappa));
  const auto& t = field.times();
  if (t.empty()) return out;
  std::vector<double> g(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) g[k] = std::pow(field.norm(k, kappa), p);
  double integral = t.front() > 0.0 ? t.front() * g.front() : 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) integral += 0.5 * (t[k] - t[k - 1]) * (g[k] + g[k - 1]);
  out.value = std::pow(integral, 1.0 / p);
  return out;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("fit_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit_slope: degenerate abscissae");
  return sxy / sxx;
}

double estimate_decay_exponent(const SolutionField& field, double kappa, double t_a,
                               double t_b) {
  if (!(t_a > 0.0 && t_b > t_a)) throw DomainError("decay fit: malformed window");
  std::vector<double> x, y;
  const auto& t = field.times();
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_a * (1.0 - 1e-12) || t[k] > t_b * (1.0 + 1e-12)) continue;
    const double nrm = field.norm(k, kappa);
    if (!(nrm > 0.0)) throw NumericError("decay fit: non-positive norm at t = " + std::to_string(t[k]));
    x.push_back(std::log(t[k]));
    y.push_back(std::log(nrm));
  }
  if (x.size() < 2) throw DomainError("decay fit: window contains fewer than two grid points");
  return fit_slope(x, y);
}

}  // namespace dodiff
