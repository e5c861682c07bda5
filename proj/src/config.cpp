#include "dodiff/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "dodiff/errors.hpp"

namespace dodiff {

namespace {

[[noreturn]] void schema_error(const kv::Section& sec, const std::string& key,
                               const std::string& msg) {
  const int line = sec.has(key) ? sec.entries().at(key).line : sec.line();
  throw kv::ConfigError("[" + sec.name() + "] " + key + " (line " + std::to_string(line) +
                            "): " + msg,
                        line, key);
}

long ranged(const kv::Section& sec, const std::string& key, long fallback, long lo, long hi) {
  const long v = sec.integer_or(key, fallback);
  if (v < lo || v > hi)
    schema_error(sec, key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

double positive(const kv::Section& sec, const std::string& key, double fallback) {
  const double v = sec.number_or(key, fallback);
  if (!(v > 0.0)) schema_error(sec, key, "must be positive");
  return v;
}

const std::vector<std::string> kProfiles{"sin", "parabola", "phi1", "zero", "modes"};
const std::vector<std::string> kSources{"none", "constant", "cosine"};

bool one_of(const std::string& v, const std::vector<std::string>& options) {
  return std::find(options.begin(), options.end(), v) != options.end();
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "|") + s;
  return out;
}

ProblemConfig problem_from_section(const kv::Section& sec) {
  sec.require_only({"u0", "u0_modes", "source", "source_mode", "source_amplitude",
                    "source_frequency", "T", "times", "time_points", "kappa"});
  ProblemConfig p;
  p.u0 = sec.text_or("u0", p.u0);
  if (!one_of(p.u0, kProfiles)) schema_error(sec, "u0", "expected " + join(kProfiles));
  if (p.u0 == "modes") {
    if (!sec.has("u0_modes")) schema_error(sec, "u0", "u0 = modes requires u0_modes");
    p.u0_modes = sec.numbers("u0_modes");
  } else if (sec.has("u0_modes")) {
    schema_error(sec, "u0_modes", "only allowed with u0 = modes");
  }
  p.source = sec.text_or("source", p.source);
  if (!one_of(p.source, kSources)) schema_error(sec, "source", "expected " + join(kSources));
  p.source_mode = static_cast<std::size_t>(ranged(sec, "source_mode", 1, 1, 1 << 20));
  p.source_amplitude = sec.number_or("source_amplitude", p.source_amplitude);
  p.source_frequency = sec.number_or("source_frequency", p.source_frequency);
  p.horizon = positive(sec, "T", p.horizon);
  if (sec.has("times")) {
    if (sec.has("time_points")) schema_error(sec, "time_points", "give either times or time_points");
    p.times = sec.numbers("times");
    for (double t : p.times)
      if (!(t > 0.0 && t <= p.horizon)) schema_error(sec, "times", "every time must lie in (0, T]");
    if (!std::is_sorted(p.times.begin(), p.times.end()))
      schema_error(sec, "times", "must be increasing");
  }
  p.time_points = static_cast<std::size_t>(ranged(sec, "time_points", 10, 1, 100000));
  if (sec.has("kappa")) {
    p.kappas = sec.numbers("kappa");
    for (double k : p.kappas)
      if (!(k >= 0.0 && k <= 1.0)) schema_error(sec, "kappa", "values must lie in [0, 1]");
  }
  return p;
}

kv::Section problem_to_section(const ProblemConfig& p) {
  kv::Section sec("problem", 0);
  sec.set("u0", p.u0);
  if (p.u0 == "modes") sec.set("u0_modes", kv::format_numbers(p.u0_modes));
  sec.set("source", p.source);
  sec.set("source_mode", std::to_string(p.source_mode));
  sec.set("source_amplitude", kv::format_number(p.source_amplitude));
  sec.set("source_frequency", kv::format_number(p.source_frequency));
  sec.set("T", kv::format_number(p.horizon));
  if (!p.times.empty())
    sec.set("times", kv::format_numbers(p.times));
  else
    sec.set("time_points", std::to_string(p.time_points));
  sec.set("kappa", kv::format_numbers(p.kappas));
  return sec;
}

NumericsConfig numerics_from_section(const kv::Section& sec) {
  sec.require_only({"seed", "theta", "ray_order", "arc_order", "panel_ratio", "truncation",
                    "spectral_rel_tol", "duhamel_panels", "duhamel_order", "grading",
                    "oracle_dt", "oracle_alpha_nodes", "kernel_modes", "kernel_times"});
  NumericsConfig n;
  n.seed = static_cast<std::uint64_t>(ranged(sec, "seed", static_cast<long>(n.seed), 0,
                                             std::numeric_limits<long>::max()));
  n.theta = sec.number_or("theta", n.theta);
  if (!(n.theta > std::numbers::pi / 2 && n.theta < std::numbers::pi))
    schema_error(sec, "theta", "must lie in (pi/2, pi)");
  n.ray_order = static_cast<int>(ranged(sec, "ray_order", n.ray_order, 2, 256));
  n.arc_order = static_cast<int>(ranged(sec, "arc_order", n.arc_order, 2, 256));
  n.panel_ratio = sec.number_or("panel_ratio", n.panel_ratio);
  if (!(n.panel_ratio > 1.0 && n.panel_ratio <= 16.0))
    schema_error(sec, "panel_ratio", "must lie in (1, 16]");
  n.truncation = sec.number_or("truncation", n.truncation);
  if (!(n.truncation >= 1e-300 && n.truncation <= 1e-6))
    schema_error(sec, "truncation", "must lie in [1e-300, 1e-6]");
  n.spectral_rel_tol = sec.number_or("spectral_rel_tol", n.spectral_rel_tol);
  if (!(n.spectral_rel_tol >= 1e-15 && n.spectral_rel_tol <= 1e-3))
    schema_error(sec, "spectral_rel_tol", "must lie in [1e-15, 1e-3]");
  n.duhamel_panels = static_cast<int>(ranged(sec, "duhamel_panels", n.duhamel_panels, 1, 4096));
  n.duhamel_order = static_cast<int>(ranged(sec, "duhamel_order", n.duhamel_order, 1, 64));
  n.grading = sec.number_or("grading", n.grading);
  if (!(n.grading >= 1.0 && n.grading <= 8.0)) schema_error(sec, "grading", "must lie in [1, 8]");
  n.oracle_dt = positive(sec, "oracle_dt", n.oracle_dt);
  n.oracle_alpha_nodes =
      static_cast<int>(ranged(sec, "oracle_alpha_nodes", n.oracle_alpha_nodes, 1, 512));
  if (sec.has("kernel_modes")) {
    n.kernel_modes = sec.numbers("kernel_modes");
    for (double m : n.kernel_modes)
      if (!(m >= 1.0 && m == std::floor(m)))
        schema_error(sec, "kernel_modes", "mode indices must be positive integers");
  }
  if (sec.has("kernel_times")) {
    n.kernel_times = sec.numbers("kernel_times");
    for (double t : n.kernel_times)
      if (!(t > 0.0)) schema_error(sec, "kernel_times", "times must be positive");
  }
  return n;
}

kv::Section numerics_to_section(const NumericsConfig& n) {
  kv::Section sec("numerics", 0);
  sec.set("seed", std::to_string(n.seed));
  sec.set("theta", kv::format_number(n.theta));
  sec.set("ray_order", std::to_string(n.ray_order));
  sec.set("arc_order", std::to_string(n.arc_order));
  sec.set("panel_ratio", kv::format_number(n.panel_ratio));
  sec.set("truncation", kv::format_number(n.truncation));
  sec.set("spectral_rel_tol", kv::format_number(n.spectral_rel_tol));
  sec.set("duhamel_panels", std::to_string(n.duhamel_panels));
  sec.set("duhamel_order", std::to_string(n.duhamel_order));
  sec.set("grading", kv::format_number(n.grading));
  sec.set("oracle_dt", kv::format_number(n.oracle_dt));
  sec.set("oracle_alpha_nodes", std::to_string(n.oracle_alpha_nodes));
  sec.set("kernel_modes", kv::format_numbers(n.kernel_modes));
  sec.set("kernel_times", kv::format_numbers(n.kernel_times));
  return sec;
}

}  // namespace

std::vector<double> ProblemConfig::time_grid() const {
  if (!times.empty()) return times;
  std::vector<double> t(time_points);
  for (std::size_t k = 0; k < time_points; ++k)
    t[k] = horizon * static_cast<double>(k + 1) / static_cast<double>(time_points);
  return t;
}

RunInputs parse_config(std::string_view text) {
  const auto doc = kv::Document::parse(text);
  for (const auto& sec : doc.sections()) {
    if (!one_of(sec.name(), {"weight", "operator", "problem", "numerics"}))
      throw kv::ConfigError("unknown section [" + sec.name() + "] (line " +
                                std::to_string(sec.line()) + ")",
                            sec.line(), sec.name());
  }
  if (!doc.has("weight"))
    throw kv::ConfigError("missing required section [weight]", 0, "weight");
  RunInputs in;
  in.weight = weight_from_section(doc.section("weight"));
  in.op = operator_from_section(doc.has("operator") ? doc.section("operator")
                                                    : kv::Section("operator", 0));
  if (doc.has("problem")) in.problem = problem_from_section(doc.section("problem"));
  if (doc.has("numerics")) in.numerics = numerics_from_section(doc.section("numerics"));
  if (in.problem.source != "none" && in.problem.source_mode > in.op.modes)
    throw PreconditionError("problem: source_mode exceeds the number of modes N");
  if (in.problem.u0_modes.size() > in.op.modes)
    throw PreconditionError("problem: more u0_modes than modes N");
  for (double m : in.numerics.kernel_modes)
    if (m > static_cast<double>(in.op.modes))
      throw PreconditionError("numerics: kernel_modes exceed the number of modes N");
  return in;
}

std::string serialize_config(const RunInputs& in) {
  std::string out;
  for (const auto& sec : {weight_to_section(in.weight), operator_to_section(in.op),
                          problem_to_section(in.problem), numerics_to_section(in.numerics)}) {
    out += "[" + sec.name() + "]\n";
    for (const auto& [k, e] : sec.entries()) out += k + " = " + e.value + "\n";
    out += "\n";
  }
  return out;
}

std::string default_config_text() {
  return "[weight]\n"
         "type = constant\n"
         "value = 1\n"
         "\n"
         "[operator]\n"
         "a = 1\n"
         "q = 0\n"
         "L = 3.141592653589793\n"
         "M = 201\n"
         "N = 64\n"
         "\n"
         "[problem]\n"
         "u0 = sin\n"
         "T = 1\n"
         "times = 0.25, 0.5, 1\n";
}

std::uint64_t config_hash(const RunInputs& inputs) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize_config(inputs)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

KernelConfig kernel_config(const RunInputs& in) {
  KernelConfig k = KernelConfig::for_weight(in.weight);
  k.theta = in.numerics.theta;
  k.ray_order = in.numerics.ray_order;
  k.arc_order = in.numerics.arc_order;
  k.panel_ratio = in.numerics.panel_ratio;
  k.truncation = in.numerics.truncation;
  k.spectral_rel_tol = in.numerics.spectral_rel_tol;
  k.validate();
  return k;
}

ProblemSpec build_problem(const RunInputs& in) { return build_problem(in, build_basis(in.op)); }

ProblemSpec build_problem(const RunInputs& in, const SpectralBasis& basis) {
  const auto& p = in.problem;
  const double length = basis.length();
  std::vector<double> c0(basis.modes(), 0.0);
  if (p.u0 == "modes") {
    std::copy(p.u0_modes.begin(), p.u0_modes.end(), c0.begin());
  } else if (p.u0 == "phi1") {
    c0[0] = 1.0;
  } else if (p.u0 != "zero") {
    std::vector<double> f(basis.grid_points());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double x = basis.grid()[i];
      f[i] = p.u0 == "sin" ? std::sin(std::numbers::pi * x / length) : x * (length - x);
    }
    c0 = project(basis, f);
  }
  Source src;
  if (p.source != "none") {
    const std::size_t m = p.source_mode - 1;
    const double amp = p.source_amplitude, freq = p.source_frequency;
    const bool cosine = p.source == "cosine";
    src.coefficients = [m, amp, freq, cosine](double t, std::span<double> f) {
      if (m < f.size()) f[m] = cosine ? amp * std::cos(freq * t) : amp;
    };
    src.bound = std::abs(amp);
  }
  ProblemSpec spec = make_problem(in.weight, basis, std::move(c0), std::move(src), p.horizon);
  spec.kernel = kernel_config(in);
  spec.duhamel_panels = in.numerics.duhamel_panels;
  spec.duhamel_order = in.numerics.duhamel_order;
  spec.grading = in.numerics.grading;
  if (p.u0 == "sin" || p.u0 == "phi1") spec.gamma = 1.0;
  spec.validate();
  return spec;
}

OracleProblem build_oracle_problem(const RunInputs& in, const ProblemSpec& spectral) {
  OracleProblem op;
  op.weight = in.weight;
  op.coeffs = in.op.coeffs;
  op.horizon = in.problem.horizon;
  const double length = in.op.coeffs.length;
  const auto& u0 = in.problem.u0;
  if (u0 == "sin")
    op.initial = [length](double x) { return std::sin(std::numbers::pi * x / length); };
  else if (u0 == "parabola")
    op.initial = [length](double x) { return x * (length - x); };
  else if (u0 != "zero")
    op.initial = profile_from_modes(spectral.basis, spectral.initial);
  op.source = grid_source_from_modes(spectral.basis, spectral.source);
  return op;
}

OracleConfig oracle_config(const RunInputs& in) {
  return OracleConfig::for_horizon(in.problem.horizon, in.numerics.oracle_dt,
                                   in.op.grid_points, in.numerics.oracle_alpha_nodes);
}

}  // namespace dodiff
