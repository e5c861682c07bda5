#pragma once

// Eigenpairs of A = -(a u')' + q u on (0, L) with homogeneous Dirichlet ends,
// sampled on a uniform grid, plus spectral projections and D(A^kappa) norms.

#include <span>
#include <string>
#include <vector>

#include "dodiff/kvdoc.hpp"

namespace dodiff {

/// Polynomial in x: sum_k c_k x^k.
struct Profile {
  std::vector<double> coeffs{0.0};

  double operator()(double x) const;
  double derivative(double x) const;
  bool is_constant() const;
  Profile plus(double shift) const;
};

struct EllipticCoefficients {
  Profile a{{1.0}};
  Profile q{{0.0}};
  double c_a = 1.0;
  double length = 3.14159265358979323846;
};

/// Checks a >= c_a > 0 and q >= 0 on a dense sample of [0, L].
void validate_coefficients(const EllipticCoefficients& coeffs);

enum class BasisKind { exact, finite_difference };

class SpectralBasis {
 public:
  SpectralBasis(BasisKind kind, double length, std::vector<double> eigenvalues,
                std::vector<double> eigenvectors, std::size_t grid_points);

  BasisKind kind() const { return kind_; }
  double length() const { return length_; }
  std::size_t modes() const { return eigenvalues_.size(); }
  std::size_t grid_points() const { return grid_.size(); }
  double spacing() const { return length_ / static_cast<double>(grid_.size() - 1); }

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// 1-based mode index.
  double lambda(std::size_t n) const { return eigenvalues_.at(n - 1); }
  /// Samples of phi_n on the grid (boundary zeros included); 1-based n.
  std::span<const double> phi(std::size_t n) const;
  const std::vector<double>& grid() const { return grid_; }
  /// Trapezoid weights of the grid inner product.
  const std::vector<double>& grid_weights() const { return weights_; }

  double inner(std::span<const double> f, std::span<const double> g) const;
  /// First `n` modes only.
  SpectralBasis truncated(std::size_t n) const;

 private:
  BasisKind kind_;
  double length_;
  std::vector<double> eigenvalues_;
  std::vector<double> eigenvectors_;  // modes x grid, row-major
  std::vector<double> grid_;
  std::vector<double> weights_;
};

/// Closed-form basis for constant a and q: lambda_n = a (n pi / L)^2 + q,
/// phi_n = sqrt(2/L) sin(n pi x / L). grid_points = 0 picks max(201, 8N+1).
SpectralBasis build_exact_dirichlet(double length, std::size_t modes,
                                    std::size_t grid_points = 0, double a = 1.0,
                                    double q = 0.0);

/// Flux-form finite differences (a at midpoints) and a symmetric tridiagonal
/// eigensolver for the lowest `modes` eigenpairs.
SpectralBasis build_fd(const EllipticCoefficients& coeffs, std::size_t grid_points,
                       std::size_t modes);

std::vector<double> project(const SpectralBasis& basis, std::span<const double> f);
std::vector<double> synthesize(const SpectralBasis& basis,
                               std::span<const double> coeffs);

/// (sum_n lambda_n^(2 kappa) |c_n|^2)^(1/2), kappa in [0, 1].
double fractional_norm(const SpectralBasis& basis, std::span<const double> coeffs,
                       double kappa);

/// CSV with columns n,lambda_n.
std::string eigenvalues_csv(const SpectralBasis& basis);
/// Whitespace-separated matrix: one row per grid point, columns x phi_1 ... phi_N.
std::string eigenvectors_text(const SpectralBasis& basis);

struct OperatorSpec {
  EllipticCoefficients coeffs;
  std::size_t grid_points = 201;
  std::size_t modes = 64;
  BasisKind basis = BasisKind::exact;
};

OperatorSpec operator_from_section(const kv::Section& section);
kv::Section operator_to_section(const OperatorSpec& spec);
SpectralBasis build_basis(const OperatorSpec& spec);

}  // namespace dodiff
