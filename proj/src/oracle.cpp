#include "dodiff/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dodiff/errors.hpp"
#include "dodiff/quadrature.hpp"
#include "dodiff/simd.hpp"

namespace dodiff {

namespace {

double interpolate(std::span<const double> values, double length, double x) {
  const std::size_t m = values.size();
  const double h = length / static_cast<double>(m - 1);
  const double pos = std::clamp(x / h, 0.0, static_cast<double>(m - 1));
  const std::size_t i = std::min(static_cast<std::size_t>(pos), m - 2);
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * values[i] + f * values[i + 1];
}

double trapezoid_norm2(std::span<const double> v, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double wgt = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
    s += wgt * v[i] * v[i];
  }
  return s * h;
}

}  // namespace

OracleConfig OracleConfig::for_horizon(double horizon, double dt, std::size_t grid_points,
                                       int alpha_nodes) {
  if (!(horizon > 0.0 && dt > 0.0)) throw PreconditionError("oracle: T and dt must be positive");
  OracleConfig cfg;
  cfg.steps = static_cast<std::size_t>(std::llround(horizon / dt));
  cfg.dt = horizon / static_cast<double>(cfg.steps);
  cfg.grid_points = grid_points;
  cfg.alpha_nodes = alpha_nodes;
  return cfg;
}

void OracleConfig::validate(double horizon) const {
  if (!(dt > 0.0) || steps == 0) throw PreconditionError("oracle: need dt > 0 and steps > 0");
  if (std::abs(dt * static_cast<double>(steps) - horizon) > 1e-9 * horizon)
    throw PreconditionError("oracle: dt * steps must equal T");
  if (grid_points < 3) throw PreconditionError("oracle: need at least 3 grid points");
  if (alpha_nodes < 1) throw PreconditionError("oracle: need at least one alpha node");
}

GridField::GridField(std::vector<double> times, double length, std::size_t grid_points,
                     std::vector<double> values)
    : times_(std::move(times)), length_(length), grid_points_(grid_points),
      values_(std::move(values)) {
  if (grid_points_ < 2 || !(length_ > 0.0))
    throw PreconditionError("GridField: malformed spatial grid");
  if (values_.size() != times_.size() * grid_points_)
    throw PreconditionError("GridField: values do not match times x grid");
}

std::vector<double> GridField::grid() const {
  std::vector<double> x(grid_points_);
  const double h = length_ / static_cast<double>(grid_points_ - 1);
  for (std::size_t i = 0; i < grid_points_; ++i) x[i] = h * static_cast<double>(i);
  return x;
}

std::span<const double> GridField::at(std::size_t k) const {
  if (k >= times_.size()) throw DomainError("GridField: time index out of range");
  return std::span(values_).subspan(k * grid_points_, grid_points_);
}

std::optional<std::size_t> GridField::time_index(double t) const {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (std::size_t k = 0; k < times_.size(); ++k)
    if (std::abs(times_[k] - t) <= tol) return k;
  return std::nullopt;
}

double GridField::sample(std::size_t k, double x) const {
  return interpolate(at(k), length_, x);
}

std::vector<double> l1_weights(double alpha, std::size_t k, double dt) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("l1_weights: alpha must lie in (0, 1)");
  if (!(dt > 0.0)) throw DomainError("l1_weights: dt must be positive");
  std::vector<double> b(k);
  const double scale = std::pow(dt, -alpha) / std::tgamma(2.0 - alpha);
  const double e = 1.0 - alpha;
  double prev = 0.0;  // j^(1-alpha) at j = 0
  for (std::size_t j = 0; j < k; ++j) {
    const double next = std::pow(static_cast<double>(j + 1), e);
    b[j] = (next - prev) * scale;
    prev = next;
  }
  return b;
}

std::vector<double> distributed_l1_weights(const WeightFunction& w, std::size_t k,
                                           double dt, int alpha_nodes) {
  std::vector<double> total(k, 0.0);
  const auto& rule = quad::gauss_legendre(alpha_nodes);
  const auto& bp = w.breakpoints();
  const auto& coeffs = w.coefficients();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    if (std::all_of(coeffs[i].begin(), coeffs[i].end(), [](double c) { return c == 0.0; }))
      continue;
    const double mid = 0.5 * (bp[i] + bp[i + 1]), half = 0.5 * (bp[i + 1] - bp[i]);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double alpha = mid + half * rule.nodes[q];
      const double omega = half * rule.weights[q] * w.mu(alpha);
      if (omega == 0.0) continue;
      const auto b = l1_weights(alpha, k, dt);
      simd::axpy(omega, b, total);
    }
  }
  return total;
}

GridField solve_oracle(const OracleProblem& problem, const OracleConfig& cfg) {
  cfg.validate(problem.horizon);
  validate_coefficients(problem.coeffs);
  const std::size_t m = cfg.grid_points, n = m - 2, steps = cfg.steps;
  const double length = problem.coeffs.length;
  const double h = length / static_cast<double>(m - 1);
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = h * static_cast<double>(i);

  const auto B = distributed_l1_weights(problem.weight, steps, cfg.dt, cfg.alpha_nodes);
  if (!(B[0] > 0.0)) throw NumericError("oracle: leading history weight is not positive");

  // (B_0 I + A_h) with A_h in flux form; factor once (Thomas).
  std::vector<double> lower(n, 0.0), diag(n), upper(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double xj = x[j + 1];
    const double am = problem.coeffs.a(xj - 0.5 * h), ap = problem.coeffs.a(xj + 0.5 * h);
    diag[j] = B[0] + (am + ap) / (h * h) + problem.coeffs.q(xj);
    if (j > 0) lower[j] = -am / (h * h);
    if (j + 1 < n) upper[j] = -ap / (h * h);
  }
  std::vector<double> c_prime(n), inv_denom(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double denom = diag[j] - (j > 0 ? lower[j] * c_prime[j - 1] : 0.0);
    if (!(std::abs(denom) > 0.0)) throw NumericError("oracle: singular tridiagonal system");
    inv_denom[j] = 1.0 / denom;
    c_prime[j] = upper[j] * inv_denom[j];
  }

  std::vector<double> values((steps + 1) * m, 0.0);
  std::vector<double> times(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) times[k] = cfg.dt * static_cast<double>(k);
  if (problem.initial)
    for (std::size_t j = 1; j + 1 < m; ++j) values[j] = problem.initial(x[j]);

  // diffs row i-1 holds u^i - u^(i-1) on the interior.
  std::vector<double> diffs(steps * n, 0.0);
  std::vector<double> rhs(n), force(m), sol(n);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double* prev = values.data() + (k - 1) * m + 1;
    for (std::size_t j = 0; j < n; ++j) rhs[j] = B[0] * prev[j];
    for (std::size_t jj = 1; jj < k; ++jj)
      simd::axpy(-B[jj], std::span<const double>(diffs.data() + (k - jj - 1) * n, n), rhs);
    if (problem.source) {
      std::fill(force.begin(), force.end(), 0.0);
      problem.source(times[k], x, force);
      for (std::size_t j = 0; j < n; ++j) rhs[j] += force[j + 1];
    }
    // Forward sweep and back substitution.
    for (std::size_t j = 0; j < n; ++j)
      sol[j] = (rhs[j] - (j > 0 ? lower[j] * sol[j - 1] : 0.0)) * inv_denom[j];
    for (std::size_t j = n - 1; j-- > 0;) sol[j] -= c_prime[j] * sol[j + 1];
    double* cur = values.data() + k * m + 1;
    double* d = diffs.data() + (k - 1) * n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(sol[j])) throw NumericError("oracle: non-finite solution value");
      cur[j] = sol[j];
      d[j] = sol[j] - prev[j];
    }
  }
  return GridField(std::move(times), length, m, std::move(values));
}

std::vector<double> compare(const GridField& a, const GridField& b,
                            std::span<const double> times) {
  if (std::abs(a.length() - b.length()) > 1e-12 * b.length())
    throw DomainError("compare: fields live on different intervals");
  const bool a_finer = a.grid_points() >= b.grid_points();
  const std::size_t m = a_finer ? a.grid_points() : b.grid_points();
  const double h = b.length() / static_cast<double>(m - 1);
  std::vector<double> out;
  std::vector<double> diff(m), ref(m);
  for (double t : times) {
    const auto ka = a.time_index(t), kb = b.time_index(t);
    if (!ka || !kb) throw DomainError("compare: time " + std::to_string(t) + " missing from a field");
    for (std::size_t i = 0; i < m; ++i) {
      const double xi = h * static_cast<double>(i);
      const double va = a_finer ? a.at(*ka)[i] : a.sample(*ka, xi);
      const double vb = a_finer ? b.sample(*kb, xi) : b.at(*kb)[i];
      diff[i] = va - vb;
      ref[i] = vb;
    }
    const double num = std::sqrt(trapezoid_norm2(diff, h));
    const double den = std::sqrt(trapezoid_norm2(ref, h));
    out.push_back(den > 0.0 ? num / den : num);
  }
  return out;
}

GridField to_grid_field(const SolutionField& field) {
  const auto& basis = field.basis();
  const std::size_t m = basis.grid_points();
  std::vector<double> values;
  values.reserve(field.times().size() * m);
  for (std::size_t k = 0; k < field.times().size(); ++k) {
    const auto v = field.values(k);
    values.insert(values.end(), v.begin(), v.end());
  }
  return GridField(field.times(), basis.length(), m, std::move(values));
}

std::function<double(double)> profile_from_modes(std::shared_ptr<const SpectralBasis> basis,
                                                 std::vector<double> coeffs) {
  coeffs.resize(basis->modes(), 0.0);
  auto values = std::make_shared<std::vector<double>>(synthesize(*basis, coeffs));
  const double length = basis->length();
  return [values, length](double x) { return interpolate(*values, length, x); };
}

std::function<void(double, std::span<const double>, std::span<double>)> grid_source_from_modes(
    std::shared_ptr<const SpectralBasis> basis, Source source) {
  if (source.empty()) return {};
  return [basis, source = std::move(source)](double t, std::span<const double> x,
                                             std::span<double> out) {
    std::vector<double> f(basis->modes(), 0.0);
    source.coefficients(t, f);
    const auto v = synthesize(*basis, f);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = interpolate(v, basis->length(), x[i]);
  };
}

}  // namespace dodiff
