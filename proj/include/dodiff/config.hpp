#pragma once

// Run configuration documents:
//
//   [weight]     type = constant|box|piecewise and its parameters
//   [operator]   a, q (polynomial coefficients), L, c_a, M, N, basis
//   [problem]    u0, u0_modes, source, source_mode, source_amplitude,
//                source_frequency, T, times | time_points, kappa
//   [numerics]   seed, kernel and Duhamel quadrature orders, tolerances,
//                oracle_dt, oracle_alpha_nodes, kernel_modes, kernel_times

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dodiff/kernel.hpp"
#include "dodiff/kvdoc.hpp"
#include "dodiff/oracle.hpp"
#include "dodiff/solver.hpp"
#include "dodiff/spectral.hpp"
#include "dodiff/weight.hpp"

namespace dodiff {

struct ProblemConfig {
  /// sin | parabola | phi1 | zero | modes (coefficients in u0_modes)
  std::string u0 = "sin";
  std::vector<double> u0_modes;
  /// none | constant | cosine: f_m(t) = A or A cos(omega t) in one mode m
  std::string source = "none";
  std::size_t source_mode = 1;
  double source_amplitude = 1.0;
  double source_frequency = 1.0;
  double horizon = 1.0;
  std::vector<double> times;    ///< explicit grid; empty means uniform
  std::size_t time_points = 10;  ///< uniform grid k T / time_points
  std::vector<double> kappas{0.0, 0.5, 1.0};

  std::vector<double> time_grid() const;
};

struct NumericsConfig {
  std::uint64_t seed = 20240611;
  double theta = 2.356194490192344929;
  int ray_order = 16;
  int arc_order = 32;
  double panel_ratio = 2.0;
  double truncation = 1e-16;
  double spectral_rel_tol = 1e-13;
  int duhamel_panels = 32;
  int duhamel_order = 8;
  double grading = 2.0;
  double oracle_dt = 1e-3;
  int oracle_alpha_nodes = 32;
  std::vector<double> kernel_modes{1, 4, 16};
  std::vector<double> kernel_times{0.01, 0.1, 1.0, 10.0};
};

struct RunInputs {
  WeightFunction weight = make_constant_weight();
  OperatorSpec op;
  ProblemConfig problem;
  NumericsConfig numerics;
};

/// Parses and validates every section. Schema problems raise kv::ConfigError
/// with line and key; invariant violations raise PreconditionError naming the
/// invariant.
RunInputs parse_config(std::string_view text);
std::string serialize_config(const RunInputs& inputs);
/// Constant weight, a = 1, q = 0 on (0, pi), u0 = sin x, T = 1.
std::string default_config_text();

/// 64-bit FNV-1a of the canonical serialization.
std::uint64_t config_hash(const RunInputs& inputs);

KernelConfig kernel_config(const RunInputs& inputs);
/// Spectral problem on the configured basis.
ProblemSpec build_problem(const RunInputs& inputs);
ProblemSpec build_problem(const RunInputs& inputs, const SpectralBasis& basis);
/// Same data for the time-stepping reference on the operator's grid.
OracleProblem build_oracle_problem(const RunInputs& inputs, const ProblemSpec& spectral);
OracleConfig oracle_config(const RunInputs& inputs);

}  // namespace dodiff
