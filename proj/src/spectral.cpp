#include "dodiff/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dodiff/errors.hpp"
#include "dodiff/simd.hpp"

namespace dodiff {

double Profile::operator()(double x) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

double Profile::derivative(double x) const {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) v = v * x + static_cast<double>(k) * coeffs[k];
  return v;
}

bool Profile::is_constant() const {
  return std::all_of(coeffs.begin() + (coeffs.empty() ? 0 : 1), coeffs.end(),
                     [](double c) { return c == 0.0; });
}

Profile Profile::plus(double shift) const {
  Profile p = *this;
  if (p.coeffs.empty()) p.coeffs.push_back(0.0);
  p.coeffs[0] += shift;
  return p;
}

void validate_coefficients(const EllipticCoefficients& c) {
  if (!(c.length > 0.0)) throw PreconditionError("operator: length must be positive");
  if (!(c.c_a > 0.0)) throw PreconditionError("operator: ellipticity floor c_a must be positive");
  constexpr int kSamples = 4000;
  for (int i = 0; i <= kSamples; ++i) {
    const double x = c.length * i / kSamples;
    if (c.a(x) < c.c_a) {
      std::ostringstream os;
      os << "operator invariant 'uniform ellipticity' violated: a(" << x
         << ") = " << c.a(x) << " < c_a = " << c.c_a;
      throw PreconditionError(os.str());
    }
    if (c.q(x) < 0.0) {
      std::ostringstream os;
      os << "operator invariant 'non-negative potential' violated: q(" << x
         << ") = " << c.q(x);
      throw PreconditionError(os.str());
    }
  }
}

SpectralBasis::SpectralBasis(BasisKind kind, double length,
                             std::vector<double> eigenvalues,
                             std::vector<double> eigenvectors,
                             std::size_t grid_points)
    : kind_(kind),
      length_(length),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)) {
  if (grid_points < 3) throw PreconditionError("basis needs at least 3 grid points");
  if (eigenvectors_.size() != eigenvalues_.size() * grid_points)
    throw PreconditionError("basis: eigenvector storage does not match modes x grid");
  grid_.resize(grid_points);
  weights_.resize(grid_points);
  const double h = length / static_cast<double>(grid_points - 1);
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid_[i] = h * static_cast<double>(i);
    weights_[i] = (i == 0 || i + 1 == grid_points) ? 0.5 * h : h;
  }
}

std::span<const double> SpectralBasis::phi(std::size_t n) const {
  if (n < 1 || n > modes()) throw DomainError("mode index out of range");
  return {eigenvectors_.data() + (n - 1) * grid_.size(), grid_.size()};
}

double SpectralBasis::inner(std::span<const double> f, std::span<const double> g) const {
  if (f.size() != grid_.size() || g.size() != grid_.size())
    throw PreconditionError("inner product: grid size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += weights_[i] * f[i] * g[i];
  return s;
}

SpectralBasis SpectralBasis::truncated(std::size_t n) const {
  n = std::min(n, modes());
  std::vector<double> ev(eigenvalues_.begin(), eigenvalues_.begin() + n);
  std::vector<double> vec(eigenvectors_.begin(),
                          eigenvectors_.begin() + n * grid_.size());
  return SpectralBasis(kind_, length_, std::move(ev), std::move(vec), grid_.size());
}

SpectralBasis build_exact_dirichlet(double length, std::size_t modes,
                                    std::size_t grid_points, double a, double q) {
  if (!(length > 0.0)) throw DomainError("exact basis: length must be positive");
  if (modes < 1) throw DomainError("exact basis: need at least one mode");
  if (grid_points == 0) grid_points = std::max<std::size_t>(201, 8 * modes + 1);
  if (modes + 1 >= grid_points)
    throw PreconditionError("exact basis: grid too coarse to resolve the modes");
  std::vector<double> ev(modes);
  std::vector<double> vec(modes * grid_points);
  const double amp = std::sqrt(2.0 / length);
  for (std::size_t n = 1; n <= modes; ++n) {
    const double k = static_cast<double>(n) * std::numbers::pi / length;
    ev[n - 1] = a * k * k + q;
    for (std::size_t i = 0; i < grid_points; ++i) {
      // n*i reduced mod 2(M-1) keeps the sine argument small.
      const std::size_t period = 2 * (grid_points - 1);
      const double frac = static_cast<double>((n * i) % period) /
                          static_cast<double>(grid_points - 1);
      vec[(n - 1) * grid_points + i] = amp * std::sin(std::numbers::pi * frac);
    }
  }
  return SpectralBasis(BasisKind::exact, length, std::move(ev), std::move(vec),
                       grid_points);
}

SpectralBasis build_fd(const EllipticCoefficients& coeffs, std::size_t grid_points,
                       std::size_t modes) {
  validate_coefficients(coeffs);
  if (grid_points < modes + 2)
    throw PreconditionError("finite-difference basis needs grid_points >= modes + 2");
  const std::size_t m = grid_points;
  const std::size_t n_int = m - 2;
  const double h = coeffs.length / static_cast<double>(m - 1);
  std::vector<double> d(n_int);
  std::vector<double> e(n_int > 0 ? n_int - 1 : 0);
  for (std::size_t j = 0; j < n_int; ++j) {
    const double x = h * static_cast<double>(j + 1);
    const double a_minus = coeffs.a(x - 0.5 * h);
    const double a_plus = coeffs.a(x + 0.5 * h);
    d[j] = (a_minus + a_plus) / (h * h) + coeffs.q(x);
    if (j + 1 < n_int) e[j] = -a_plus / (h * h);
  }
  std::vector<double> w(n_int);
  std::vector<double> z(n_int * modes);
  std::vector<lapack_int> support(2 * modes);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(n_int), d.data(), e.data(),
      0.0, 0.0, 1, static_cast<lapack_int>(modes), 0.0, &found, w.data(), z.data(),
      static_cast<lapack_int>(n_int), support.data());
  if (info != 0 || found != static_cast<lapack_int>(modes))
    throw NumericError("finite-difference eigensolver failed (info = " +
                       std::to_string(info) + ")");

  std::vector<double> ev(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(modes));
  std::vector<double> vec(modes * m, 0.0);
  const double scale = 1.0 / std::sqrt(h);
  for (std::size_t k = 0; k < modes; ++k) {
    const double* col = z.data() + k * n_int;
    // Fix the sign so phi_n leaves x = 0 upwards.
    const double sign = col[0] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n_int; ++j) vec[k * m + j + 1] = sign * scale * col[j];
  }
  // Discrete counterpart of c_a (pi/L)^2: the lowest eigenvalue of the
  // constant-coefficient stencil with a = c_a.
  const double floor =
      coeffs.c_a * 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / (2.0 * coeffs.length)), 2);
  if (ev.front() < floor * (1.0 - 1e-9))
    throw NumericError("finite-difference basis violates the spectral floor");
  return SpectralBasis(BasisKind::finite_difference, coeffs.length, std::move(ev),
                       std::move(vec), m);
}

std::vector<double> project(const SpectralBasis& basis, std::span<const double> f) {
  if (f.size() != basis.grid_points())
    throw PreconditionError("project: grid function has wrong length");
  std::vector<double> wf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) wf[i] = basis.grid_weights()[i] * f[i];
  std::vector<double> c(basis.modes());
  for (std::size_t n = 1; n <= basis.modes(); ++n) c[n - 1] = simd::dot(wf, basis.phi(n));
  return c;
}

std::vector<double> synthesize(const SpectralBasis& basis,
                               std::span<const double> coeffs) {
  if (coeffs.size() > basis.modes())
    throw PreconditionError("synthesize: more coefficients than modes");
  std::vector<double> f(basis.grid_points(), 0.0);
  for (std::size_t n = 1; n <= coeffs.size(); ++n)
    if (coeffs[n - 1] != 0.0) simd::axpy(coeffs[n - 1], basis.phi(n), f);
  return f;
}

double fractional_norm(const SpectralBasis& basis, std::span<const double> coeffs,
                       double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("fractional_norm: kappa must lie in [0, 1]");
  if (coeffs.size() > basis.modes())
    throw PreconditionError("fractional_norm: more coefficients than modes");
  double s = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const double weight = kappa == 0.0 ? 1.0 : std::pow(basis.eigenvalues()[n], 2.0 * kappa);
    s += weight * coeffs[n] * coeffs[n];
  }
  return std::sqrt(s);
}

std::string eigenvalues_csv(const SpectralBasis& basis) {
  std::ostringstream os;
  os.precision(17);
  os << "n,lambda_n\n";
  for (std::size_t n = 1; n <= basis.modes(); ++n) os << n << ',' << basis.lambda(n) << '\n';
  return os.str();
}

std::string eigenvectors_text(const SpectralBasis& basis) {
  std::ostringstream os;
  os.precision(17);
  os << "# x";
  for (std::size_t n = 1; n <= basis.modes(); ++n) os << " phi_" << n;
  os << '\n';
  for (std::size_t i = 0; i < basis.grid_points(); ++i) {
    os << basis.grid()[i];
    for (std::size_t n = 1; n <= basis.modes(); ++n) os << ' ' << basis.phi(n)[i];
    os << '\n';
  }
  return os.str();
}

OperatorSpec operator_from_section(const kv::Section& sec) {
  sec.require_only({"a", "q", "L", "c_a", "M", "N", "basis"});
  OperatorSpec spec;
  spec.coeffs.a.coeffs = sec.has("a") ? sec.numbers("a") : std::vector<double>{1.0};
  spec.coeffs.q.coeffs = sec.has("q") ? sec.numbers("q") : std::vector<double>{0.0};
  spec.coeffs.length = sec.number_or("L", std::numbers::pi);
  spec.coeffs.c_a = sec.number_or("c_a", spec.coeffs.a(0.0));
  spec.grid_points = static_cast<std::size_t>(sec.integer_or("M", 201));
  spec.modes = static_cast<std::size_t>(sec.integer_or("N", 64));
  const std::string kind = sec.text_or("basis", "auto");
  if (kind == "exact") {
    spec.basis = BasisKind::exact;
  } else if (kind == "fd") {
    spec.basis = BasisKind::finite_difference;
  } else if (kind == "auto") {
    spec.basis = spec.coeffs.a.is_constant() && spec.coeffs.q.is_constant()
                     ? BasisKind::exact
                     : BasisKind::finite_difference;
  } else {
    throw kv::ConfigError("[operator] basis (line " +
                              std::to_string(sec.entries().at("basis").line) +
                              "): expected exact|fd|auto",
                          sec.entries().at("basis").line, "basis");
  }
  if (spec.modes < 1) throw kv::ConfigError("[operator] N must be >= 1", 0, "N");
  validate_coefficients(spec.coeffs);
  if (spec.basis == BasisKind::exact &&
      !(spec.coeffs.a.is_constant() && spec.coeffs.q.is_constant()))
    throw PreconditionError("operator: exact basis requires constant a and q");
  return spec;
}

kv::Section operator_to_section(const OperatorSpec& spec) {
  kv::Section sec("operator", 0);
  sec.set("a", kv::format_numbers(spec.coeffs.a.coeffs));
  sec.set("q", kv::format_numbers(spec.coeffs.q.coeffs));
  sec.set("L", kv::format_number(spec.coeffs.length));
  sec.set("c_a", kv::format_number(spec.coeffs.c_a));
  sec.set("M", std::to_string(spec.grid_points));
  sec.set("N", std::to_string(spec.modes));
  sec.set("basis", spec.basis == BasisKind::exact ? "exact" : "fd");
  return sec;
}

SpectralBasis build_basis(const OperatorSpec& spec) {
  if (spec.basis == BasisKind::exact)
    return build_exact_dirichlet(spec.coeffs.length, spec.modes, spec.grid_points,
                                 spec.coeffs.a.coeffs[0], spec.coeffs.q.coeffs[0]);
  return build_fd(spec.coeffs, spec.grid_points, spec.modes);
}

}  // namespace dodiff
