#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "dodiff/config.hpp"

namespace dodiff::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string subcommand;  ///< kernel | solve | oracle | verify
  std::string config_path;  ///< empty: built-in default configuration
  std::string out_dir = ".";
  std::string suite = "all";
  std::optional<std::size_t> modes;
  std::optional<std::uint64_t> seed;
  std::optional<double> oracle_dt;
};

std::string usage();

/// Loads the configuration and applies the command-line overrides.
RunInputs load_inputs(const RunConfig& run);

/// Runs one subcommand. 0 on success, 1 on a failed run or suite, 2 on
/// configuration errors.
int dispatch(const RunConfig& run, std::ostream& out, std::ostream& err);

/// argv entry point; an unknown subcommand prints usage and returns 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dodiff::cli
