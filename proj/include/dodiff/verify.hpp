#pragma once

// Numerical experiments for the decay, regularity, stability and bound
// statements. Every metric row carries its tolerance and outcome.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dodiff {

class SolutionField;

enum class Comparator { le, lt, ge, gt, info };

struct MetricRow {
  std::string case_id;
  std::string metric;
  double value = 0.0;
  Comparator comparator = Comparator::info;
  double tolerance = 0.0;
  bool pass = true;
};

struct ExperimentReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<MetricRow> rows;
  std::vector<std::string> notes;
  bool inconclusive = false;
  std::string csv_path;

  void parameter(std::string key, std::string value);
  /// Appends a row; pass is computed from the comparator.
  void add(std::string case_id, std::string metric, double value, Comparator cmp,
           double tolerance);
  void info(std::string case_id, std::string metric, double value);
  bool passed() const;
  std::size_t failures() const;
  /// case,metric,value,comparator,tolerance,pass
  std::string csv() const;
  std::string summary() const;
};

struct VerifyConfig {
  std::uint64_t seed = 20240611;
  std::size_t modes = 64;
  std::size_t symbol_samples = 10000;
  std::size_t family_size = 20;
  std::vector<double> stability_eps{1e-1, 1e-2, 1e-3};
};

ExperimentReport run_decay_suite(const VerifyConfig& cfg);
ExperimentReport run_h2_suite(const VerifyConfig& cfg);
ExperimentReport run_stability_suite(const VerifyConfig& cfg);
ExperimentReport run_bound_suite(const VerifyConfig& cfg);
ExperimentReport run_smoothness_probe(const VerifyConfig& cfg);

/// Names accepted by the CLI: decay, h2, stability, bounds, smoothness.
std::vector<std::string> suite_names();
ExperimentReport run_suite(const std::string& name, const VerifyConfig& cfg);

/// Largest |f[t_i..t_{i+k}]| t_i^k / max_j |f(t_j)| over the grid, for
/// vector-valued samples (row per time, Euclidean norm). Index k of the result
/// is the order-k value, k = 0..max_order.
std::vector<double> scaled_divided_differences(std::span<const double> times,
                                               std::span<const double> values,
                                               std::size_t width, std::size_t max_order);

/// Smoothness flag threshold on the scaled differences.
inline constexpr double kSmoothnessThreshold = 100.0;

}  // namespace dodiff
