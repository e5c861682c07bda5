#pragma once

// Brute-force reference: L1 discretization of every Caputo derivative in the
// distributed-order operator, Gauss-Legendre in alpha, implicit finite
// differences in space.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dodiff/solver.hpp"
#include "dodiff/spectral.hpp"
#include "dodiff/weight.hpp"

namespace dodiff {

struct OracleConfig {
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t grid_points = 201;
  int alpha_nodes = 32;  ///< per piece of mu that is not identically zero

  /// Steps chosen so that steps * dt = T.
  static OracleConfig for_horizon(double horizon, double dt, std::size_t grid_points = 201,
                                  int alpha_nodes = 32);
  void validate(double horizon) const;
};

struct OracleProblem {
  WeightFunction weight = make_constant_weight();
  EllipticCoefficients coeffs;
  std::function<double(double x)> initial;  ///< empty means u0 = 0
  /// F(t, x_i) on the oracle grid; empty means F = 0.
  std::function<void(double t, std::span<const double> x, std::span<double> out)> source;
  double horizon = 1.0;
};

/// Values on a uniform spatial grid (boundary points included), row per time.
class GridField {
 public:
  GridField(std::vector<double> times, double length, std::size_t grid_points,
            std::vector<double> values);

  const std::vector<double>& times() const { return times_; }
  double length() const { return length_; }
  std::size_t grid_points() const { return grid_points_; }
  std::vector<double> grid() const;
  std::span<const double> at(std::size_t k) const;
  std::optional<std::size_t> time_index(double t) const;
  /// Linear interpolation of row k onto x.
  double sample(std::size_t k, double x) const;

 private:
  std::vector<double> times_;
  double length_;
  std::size_t grid_points_;
  std::vector<double> values_;
};

/// b_j = ((j+1)^(1-alpha) - j^(1-alpha)) dt^(-alpha) / Gamma(2 - alpha), j < k.
std::vector<double> l1_weights(double alpha, std::size_t k, double dt);

/// Combined history weights sum_q w_q mu(alpha_q) b_j^(alpha_q).
std::vector<double> distributed_l1_weights(const WeightFunction& w, std::size_t k,
                                           double dt, int alpha_nodes);

/// Rows at t_k = k dt for k = 0..steps.
GridField solve_oracle(const OracleProblem& problem, const OracleConfig& cfg);

/// Relative L2 discrepancy |a - b| / |b| per time, on the finer of the two
/// grids (the coarser one is interpolated linearly).
std::vector<double> compare(const GridField& a, const GridField& b,
                            std::span<const double> times);

/// Synthesizes a spectral solution on its basis grid.
GridField to_grid_field(const SolutionField& field);

/// Adapters from mode coefficients to physical-space data.
std::function<double(double)> profile_from_modes(std::shared_ptr<const SpectralBasis> basis,
                                                 std::vector<double> coeffs);
std::function<void(double, std::span<const double>, std::span<double>)> grid_source_from_modes(
    std::shared_ptr<const SpectralBasis> basis, Source source);

}  // namespace dodiff
