#pragma once

// Per-mode relaxation kernels
//   E_n(t) = (1/2 pi i) int_gamma w(s) / (s w(s) + lambda_n) e^{st} ds
//   G_n(t) = (1/2 pi i) int_gamma 1 / (s w(s) + lambda_n) e^{st} ds
// by contour quadrature, and G_n, E_n by the real-axis spectral density
//   Phi_n(r) = N / ((D + lambda_n)^2 + N^2),   D + iN = s w(s) at s = r e^{i pi}.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dodiff/spectral.hpp"
#include "dodiff/weight.hpp"

namespace dodiff {

struct KernelConfig {
  double eta = 0.5;  ///< 1 / (2 |mu|_inf)
  double theta = 2.356194490192344929;  ///< 3 pi / 4
  int ray_order = 16;
  double panel_ratio = 2.0;
  int arc_order = 32;
  double truncation = 1e-16;  ///< e^{R t cos theta} bound at the ray cutoff
  double residue_tolerance = 1e-10;
  double spectral_rel_tol = 1e-13;

  static KernelConfig for_weight(const WeightFunction& w);
  void validate() const;
};

/// Contour gamma(eps, theta): rays at +-theta from eps to R joined by the arc
/// |s| = eps.
struct ContourSpec {
  double epsilon = 0.5;
  double theta = 2.356194490192344929;
  double cutoff = 1.0;  ///< R(t)
  int ray_order = 16;
  double panel_ratio = 2.0;
  int arc_order = 32;
  /// Integrate the full contour instead of using conjugate symmetry and check
  /// that the imaginary part of the result vanishes.
  bool check_residue = false;
  double residue_tolerance = 1e-10;
  double truncation = 1e-16;

  /// Throws NumericError when the truncation certificate fails at time t and
  /// PreconditionError on malformed geometry.
  void validate(double t) const;
  /// Number of ray panels between epsilon and cutoff.
  int ray_panels() const;
  int ray_nodes() const { return ray_panels() * ray_order; }
};

/// eps = min(min(1, eta lambda1, zeta^{-1}(eta lambda1)) / 2, 1/t), the given
/// theta, R(t) = ln(1/truncation) / (t |cos theta|).
ContourSpec choose_contour(double t, double lambda1, const WeightFunction& w,
                           const KernelConfig& cfg);

struct ModeKernels {
  std::vector<double> E;
  std::vector<double> G;
};

/// E and G for every lambda in one sweep over the contour nodes (the symbol
/// s w(s) is shared by all modes).
ModeKernels eval_kernels_contour(double t, std::span<const double> lambdas,
                                 const WeightFunction& w, const ContourSpec& spec);

/// Imaginary parts of the full-contour E and G before real casting.
struct ContourResidue {
  double E_imag = 0.0;
  double G_imag = 0.0;
  double E = 0.0;
  double G = 0.0;
};
ContourResidue contour_residue(double t, double lambda, const WeightFunction& w,
                               const ContourSpec& spec);

double eval_En_contour(std::size_t n, double t, const SpectralBasis& basis,
                       const WeightFunction& w, const ContourSpec& spec);
double eval_Gn_contour(std::size_t n, double t, const SpectralBasis& basis,
                       const WeightFunction& w, const ContourSpec& spec);

/// Spectral density for an explicit eigenvalue.
double spectral_density(double lambda, double r, const WeightFunction& w);
double phi_n(std::size_t n, double r, const SpectralBasis& basis,
             const WeightFunction& w);

/// G = (1/pi) int_0^inf Phi e^{-rt} dr.
double spectral_G(double lambda, double t, const WeightFunction& w,
                  double rel_tol = 1e-13);
/// E = (lambda/pi) int_0^inf Phi / r e^{-rt} dr (E' = -lambda G, E(inf) = 0).
double spectral_E(double lambda, double t, const WeightFunction& w,
                  double rel_tol = 1e-13);
double eval_Gn_spectral(std::size_t n, double t, const SpectralBasis& basis,
                        const WeightFunction& w, double rel_tol = 1e-13);

/// -lambda_n G_n(t).
double dEn_dt(std::size_t n, double t, const SpectralBasis& basis,
              const WeightFunction& w, const ContourSpec& spec);
/// Central difference of E_n with step rel_step * t; for testing.
double dEn_dt_fd(std::size_t n, double t, const SpectralBasis& basis,
                 const WeightFunction& w, const KernelConfig& cfg,
                 double rel_step = 1e-4);

/// a solving int_0^1 a^alpha mu dalpha = lambda / 2.
double threshold_for(double lambda, const WeightFunction& w);
double an_threshold(std::size_t n, const SpectralBasis& basis,
                    const WeightFunction& w);

struct G0cResult {
  double a_n = 0.0;
  double lower = 0.0;    ///< int_0^{a_n} Phi / r
  double upper = 0.0;    ///< int_{a_n}^inf Phi / r
  double unsplit = 0.0;  ///< same integral without the split point
  double product = 0.0;  ///< lambda_n (lower + upper)
};
G0cResult check_g0c(std::size_t n, const SpectralBasis& basis,
                    const WeightFunction& w);

enum class KernelMethod { contour, spectral };
std::string method_name(KernelMethod m);

/// Sampled kernels, row-major modes x times. Immutable once built.
class KernelTable {
 public:
  KernelTable(std::vector<std::size_t> modes, std::vector<double> times,
              std::vector<double> E, std::vector<double> G, KernelMethod method);

  const std::vector<std::size_t>& modes() const { return modes_; }
  const std::vector<double>& times() const { return times_; }
  KernelMethod method() const { return method_; }
  double E(std::size_t mode_row, std::size_t time_col) const;
  double G(std::size_t mode_row, std::size_t time_col) const;

 private:
  std::vector<std::size_t> modes_;
  std::vector<double> times_;
  std::vector<double> E_, G_;
  KernelMethod method_;
};

/// Parallel over time points (contour) or (mode, time) pairs (spectral).
KernelTable build_kernel_table(std::span<const std::size_t> modes,
                               std::span<const double> times,
                               const SpectralBasis& basis, const WeightFunction& w,
                               const KernelConfig& cfg, KernelMethod method);

/// Columns n,t,E_n,G_n_contour,G_n_spectral,rel_diff.
std::string kernel_csv(const KernelTable& contour, const KernelTable& spectral);

}  // namespace dodiff
