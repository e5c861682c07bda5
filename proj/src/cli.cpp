#include "dodiff/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dodiff/errors.hpp"
#include "dodiff/simd.hpp"
#include "dodiff/verify.hpp"

namespace dodiff::cli {

namespace {

namespace fs = std::filesystem;

std::string hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

struct Output {
  fs::path dir;
  std::string header;  // '#' comment line shared by every CSV

  void write(const std::string& name, const std::string& body, bool csv = true) const {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    if (csv) f << header;
    f << body;
  }
};

Output prepare_output(const RunConfig& run, const RunInputs& in) {
  Output o;
  o.dir = run.out_dir;
  fs::create_directories(o.dir);
  o.header = "# dodiff " + std::string(kVersion) + " " + run.subcommand +
             " config_hash=" + hex(config_hash(in)) + " seed=" + std::to_string(in.numerics.seed) +
             "\n";
  const auto k = kernel_config(in);
  std::ostringstream p;
  p << "tool = dodiff " << kVersion << "\n"
    << "subcommand = " << run.subcommand << "\n";
  if (run.subcommand == "verify") p << "suite = " << run.suite << "\n";
  p << "config_hash = " << hex(config_hash(in)) << "\n"
    << "seed = " << in.numerics.seed << "\n"
    << "simd = " << simd::level_name(simd::active_level()) << "\n"
    << "tolerance.contour_truncation = " << kv::format_number(k.truncation) << "\n"
    << "tolerance.contour_residue = " << kv::format_number(k.residue_tolerance) << "\n"
    << "tolerance.spectral_rel = " << kv::format_number(k.spectral_rel_tol) << "\n"
    << "tolerance.symbol_bound_slack = " << kv::format_number(SymbolBoundReport::kTolerance) << "\n"
    << "quadrature.weight_order = " << in.weight.order() << "\n"
    << "quadrature.ray_order = " << k.ray_order << "\n"
    << "quadrature.arc_order = " << k.arc_order << "\n"
    << "\n# configuration\n"
    << serialize_config(in);
  o.write("provenance.txt", p.str(), false);
  return o;
}

std::string solution_csv(const std::vector<double>& times, const std::vector<double>& grid,
                         const std::vector<std::vector<double>>& rows) {
  std::string out = "t,x,u\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t i = 0; i < grid.size(); ++i)
      out += number(times[k]) + "," + number(grid[i]) + "," + number(rows[k][i]) + "\n";
  return out;
}

std::string norms_csv(const std::vector<double>& times, const SpectralBasis& basis,
                      const std::vector<std::vector<double>>& coeffs,
                      const std::vector<double>& kappas) {
  std::string out = "t,L2";
  for (double k : kappas) out += ",DA_kappa_" + kv::format_number(k);
  out += "\n";
  for (std::size_t j = 0; j < times.size(); ++j) {
    out += number(times[j]) + "," + number(fractional_norm(basis, coeffs[j], 0.0));
    for (double k : kappas) out += "," + number(fractional_norm(basis, coeffs[j], k));
    out += "\n";
  }
  return out;
}

int run_kernel(const RunConfig& run, const RunInputs& in, std::ostream& out) {
  const auto basis = build_basis(in.op);
  std::vector<std::size_t> modes;
  for (double m : in.numerics.kernel_modes) modes.push_back(static_cast<std::size_t>(m));
  const auto& times = in.numerics.kernel_times;
  const auto cfg = kernel_config(in);
  const auto contour = build_kernel_table(modes, times, basis, in.weight, cfg, KernelMethod::contour);
  const auto spectral = build_kernel_table(modes, times, basis, in.weight, cfg, KernelMethod::spectral);
  const Output o = prepare_output(run, in);
  o.write("kernel.csv", kernel_csv(contour, spectral));
  out << "kernel: " << modes.size() * times.size() << " rows -> " << (o.dir / "kernel.csv").string()
      << "\n";
  return 0;
}

int run_solve(const RunConfig& run, const RunInputs& in, std::ostream& out) {
  const auto problem = build_problem(in);
  const auto times = in.problem.time_grid();
  const auto field = solve(problem, times);
  std::vector<std::vector<double>> values, coeffs;
  for (std::size_t k = 0; k < times.size(); ++k) {
    values.push_back(field.values(k));
    coeffs.emplace_back(field.at(k).begin(), field.at(k).end());
  }
  const Output o = prepare_output(run, in);
  o.write("solution.csv", solution_csv(times, problem.basis->grid(), values));
  o.write("norms.csv", norms_csv(times, *problem.basis, coeffs, in.problem.kappas));
  // Time-integrated norms only where the path norm is defined (kappa < 1).
  for (double kappa : in.problem.kappas) {
    if (kappa >= 1.0) continue;
    const auto path = sobolev_norm_path(field, kappa, 1.0, in.weight.certificate().alpha0);
    out << "L1(0,T; D(A^" << kappa << ")) = " << path.value
        << (path.outside_estimate_range ? " (outside estimate range)" : "") << "\n";
  }
  out << "solve: " << times.size() << " times x " << problem.basis->grid_points()
      << " points -> " << o.dir.string() << "\n";
  return 0;
}

int run_oracle(const RunConfig& run, const RunInputs& in, std::ostream& out) {
  const auto problem = build_problem(in);
  const auto oracle = solve_oracle(build_oracle_problem(in, problem), oracle_config(in));
  const auto times = in.problem.time_grid();
  const auto& basis = *problem.basis;
  if (basis.grid_points() != oracle.grid_points())
    throw DomainError("oracle grid does not match the operator grid M");
  std::vector<std::vector<double>> values, coeffs;
  for (double t : times) {
    const auto k = oracle.time_index(t);
    if (!k) throw DomainError("time " + std::to_string(t) + " is not a multiple of oracle_dt");
    values.emplace_back(oracle.at(*k).begin(), oracle.at(*k).end());
    coeffs.push_back(project(basis, values.back()));
  }
  const Output o = prepare_output(run, in);
  o.write("solution.csv", solution_csv(times, oracle.grid(), values));
  o.write("norms.csv", norms_csv(times, basis, coeffs, in.problem.kappas));
  out << "oracle: " << oracle_config(in).steps << " steps, " << times.size()
      << " output times -> " << o.dir.string() << "\n";
  return 0;
}

int run_verify(const RunConfig& run, const RunInputs& in, std::ostream& out, std::ostream& err) {
  VerifyConfig cfg;
  cfg.seed = in.numerics.seed;
  if (run.modes) cfg.modes = *run.modes;
  std::vector<std::string> suites;
  if (run.suite == "all") {
    suites = suite_names();
  } else {
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), run.suite) == names.end()) {
      err << "unknown suite '" << run.suite << "'\n" << usage();
      return 2;
    }
    suites = {run.suite};
  }
  const Output o = prepare_output(run, in);
  int status = 0;
  for (const auto& name : suites) {
    ExperimentReport rep;
    try {
      rep = run_suite(name, cfg);
    } catch (const std::exception& e) {
      err << "error [verify/" << name << "]: " << e.what() << "\n";
      status = 1;
      continue;
    }
    rep.csv_path = (o.dir / (name + ".csv")).string();
    o.write(name + ".csv", rep.csv());
    o.write(name + "_summary.txt", rep.summary(), false);
    out << rep.summary();
    if (!rep.passed()) {
      err << "verify: suite " << name << " did not pass\n";
      status = 1;
    }
  }
  return status;
}

}  // namespace

std::string usage() {
  return "usage: dodiff <kernel|solve|oracle|verify> [options]\n"
         "  --config FILE   run configuration (default: built-in heat-like problem)\n"
         "  --out DIR       output directory (default: .)\n"
         "  --suite NAME    verify only: decay|h2|stability|bounds|smoothness|all\n"
         "  --modes N       override [operator] N\n"
         "  --seed S        override [numerics] seed\n"
         "  --dt DT         override [numerics] oracle_dt\n";
}

RunInputs load_inputs(const RunConfig& run) {
  std::string text = default_config_text();
  if (!run.config_path.empty()) {
    std::ifstream f(run.config_path, std::ios::binary);
    if (!f) throw kv::ConfigError("cannot read configuration file '" + run.config_path + "'", 0, "");
    std::ostringstream s;
    s << f.rdbuf();
    text = s.str();
  }
  RunInputs in = parse_config(text);
  if (run.modes) {
    if (*run.modes < 1 || *run.modes + 2 > in.op.grid_points)
      throw kv::ConfigError("--modes must lie in [1, M - 2]", 0, "N");
    in.op.modes = *run.modes;
    // keep only the kernel modes that still exist
    std::erase_if(in.numerics.kernel_modes, [&](double m) { return m > double(*run.modes); });
    if (in.numerics.kernel_modes.empty()) in.numerics.kernel_modes = {1.0};
  }
  if (run.seed) in.numerics.seed = *run.seed;
  if (run.oracle_dt) {
    if (!(*run.oracle_dt > 0.0)) throw kv::ConfigError("--dt must be positive", 0, "oracle_dt");
    in.numerics.oracle_dt = *run.oracle_dt;
  }
  // Re-run the cross-section checks after overrides.
  return parse_config(serialize_config(in));
}

int dispatch(const RunConfig& run, std::ostream& out, std::ostream& err) {
  RunInputs in;
  try {
    in = load_inputs(run);
  } catch (const kv::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "config error: invariant violated: " << e.what() << "\n";
    return 2;
  }
  try {
    if (run.subcommand == "kernel") return run_kernel(run, in, out);
    if (run.subcommand == "solve") return run_solve(run, in, out);
    if (run.subcommand == "oracle") return run_oracle(run, in, out);
    if (run.subcommand == "verify") return run_verify(run, in, out, err);
  } catch (const std::exception& e) {
    err << "error [" << run.subcommand << "]: " << e.what() << "\n";
    return 1;
  }
  err << usage();
  return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const std::string sub = argc > 1 ? argv[1] : "";
  if (sub == "-h" || sub == "--help") {
    out << usage();
    return 0;
  }
  if (sub != "kernel" && sub != "solve" && sub != "oracle" && sub != "verify") {
    if (!sub.empty()) err << "unknown subcommand '" << sub << "'\n";
    err << usage();
    return 2;
  }
  RunConfig rc;
  rc.subcommand = sub;
  CLI::App app{"dodiff " + sub};
  app.add_option("--config", rc.config_path);
  app.add_option("--out", rc.out_dir);
  app.add_option("--suite", rc.suite);
  std::size_t modes = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  auto* o_modes = app.add_option("--modes", modes);
  auto* o_seed = app.add_option("--seed", seed);
  auto* o_dt = app.add_option("--dt", dt);
  try {
    app.parse(argc - 1, argv + 1);
  } catch (const CLI::CallForHelp&) {
    out << usage();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << usage();
    return 2;
  }
  if (*o_modes) rc.modes = modes;
  if (*o_seed) rc.seed = seed;
  if (*o_dt) rc.oracle_dt = dt;
  return dispatch(rc, out, err);
}

}  // namespace dodiff::cli
