#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dodiff/errors.hpp"
#include "dodiff/verify.hpp"

using namespace dodiff;

namespace {

const MetricRow* find(const ExperimentReport& r, const std::string& c, const std::string& m) {
  for (const auto& row : r.rows)
    if (row.case_id == c && row.metric == m) return &row;
  return nullptr;
}

}  // namespace

TEST_CASE("report bookkeeping") {
  ExperimentReport r;
  r.id = "demo";
  r.parameter("seed", "1");
  r.add("a", "x", 0.5, Comparator::le, 1.0);
  r.add("a", "y", 2.0, Comparator::lt, 1.0);
  r.add("b", "z", NAN, Comparator::ge, 0.0);
  r.info("b", "note", 3.0);
  CHECK(r.rows[0].pass);
  CHECK_FALSE(r.rows[1].pass);
  CHECK_FALSE(r.rows[2].pass);
  CHECK(r.rows[3].pass);
  CHECK(r.failures() == 2);
  CHECK_FALSE(r.passed());
  CHECK(r.csv().rfind("case,metric,value,comparator,tolerance,pass\n", 0) == 0);
  CHECK(r.summary().rfind("suite demo: FAIL", 0) == 0);

  ExperimentReport ok;
  ok.id = "ok";
  ok.add("c", "m", 1.0, Comparator::gt, 0.0);
  CHECK(ok.passed());
  ok.inconclusive = true;
  CHECK_FALSE(ok.passed());
  CHECK(ok.summary().find("INCONCLUSIVE") != std::string::npos);
}

TEST_CASE("divided differences") {
  std::vector<double> t, cubic, step;
  for (int k = 0; k < 20; ++k) {
    t.push_back(0.5 * std::pow(4.0, k / 19.0));
    cubic.push_back(2.0 - t.back() + 0.25 * std::pow(t.back(), 4));
    step.push_back(t.back() < 1.3 ? 0.0 : 1.0);
  }
  const auto dc = scaled_divided_differences(t, cubic, 1, 5);
  CHECK(dc[5] < 1e-6);
  CHECK(dc[4] > 0.0);
  const auto ds = scaled_divided_differences(t, step, 1, 4);
  CHECK(ds[4] > kSmoothnessThreshold);
  CHECK_THROWS_AS(scaled_divided_differences(t, cubic, 2, 3), PreconditionError);
}

TEST_CASE("bounds suite") {
  VerifyConfig cfg;
  const auto r = run_bound_suite(cfg);
  CHECK(r.passed());
  for (const auto& row : r.rows)
    if (row.metric.rfind("violations_", 0) == 0) CHECK(row.value == 0.0);
  const auto* band = find(r, "g0c_taper", "max_over_min_product");
  REQUIRE(band != nullptr);
  CHECK(band->value < 10.0);
  // reproducible under a fixed seed
  CHECK(run_bound_suite(cfg).csv() == r.csv());
}

TEST_CASE("decay suite") {
  const auto r = run_decay_suite(VerifyConfig{});
  CHECK(r.passed());
  const auto* fit = find(r, "synthetic_power_law", "abs(slope + 0.3)");
  REQUIRE(fit != nullptr);
  CHECK(fit->value <= 1e-6);
  const auto* ultra = find(r, "ultraslow", "max_over_min_norm_log_t");
  REQUIRE(ultra != nullptr);
  CHECK(ultra->value < 5.0);
}

TEST_CASE("h2 and smoothness suites") {
  VerifyConfig cfg;
  cfg.family_size = 8;
  const auto h2 = run_h2_suite(cfg);
  CHECK(h2.passed());
  CHECK(find(h2, "zero_source", "skipped") != nullptr);
  CHECK(find(h2, "phi1_constant", "ratio_L2DA_over_L2F")->value > 0.0);

  const auto sm = run_smoothness_probe(cfg);
  CHECK(sm.passed());
  CHECK(find(sm, "step_synthetic", "scaled_dd_order4_flagged")->pass);
}

TEST_CASE("stability suite") {
  VerifyConfig cfg;
  cfg.modes = 8;
  const auto r = run_stability_suite(cfg);
  CHECK(r.passed());
  CHECK(find(r, "zero_perturbation", "difference")->value == 0.0);
  for (const std::string kind : {"mu", "a", "q", "joint"}) CHECK(find(r, kind, "ratio_drift")->value < 2.0);
}

TEST_CASE("suite lookup") {
  CHECK(suite_names().size() == 5);
  CHECK_THROWS_AS(run_suite("nope", VerifyConfig{}), DomainError);
  CHECK(run_suite("bounds", VerifyConfig{}).id == "bounds");
}
