#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hypharm/config.hpp"
#include "hypharm/report.hpp"

namespace hypharm::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

struct OutputOptions {
  std::string out_dir = "out";
  bool json = false;
  bool svg = false;
  /// Worker threads for independent experiments; 0 = hardware concurrency.
  int jobs = 0;
  /// ISO-8601 UTC stamp written into JSON reports (empty = omitted).
  std::string timestamp;
};

struct CommandOutput {
  std::vector<ExperimentReport> reports;
  std::vector<std::string> files;  // written paths, in write order
  std::vector<std::string> messages;
  bool pass = true;
};

/// c(lambda), |c|^{-2}, the lambda tanh(pi lambda) reference and the pointwise
/// symbol constants over [0, lambda_max]; the first row is the normalization
/// point lambda = -i rho.
CommandOutput cmd_ctable(const RunConfig& config, const OutputOptions& options);

/// Named inputs accepted by cmd_transform besides a serialized FunctionOnX file.
const std::vector<std::string>& builtin_inputs();
FunctionOnX builtin_input(const std::string& name, const PolarGrid& grid);

/// Forward/inverse, Plancherel, Radon inversion, projection-slice and
/// adjointness residuals for config.run.input (a built-in name or a file).
CommandOutput cmd_transform(const RunConfig& config, const OutputOptions& options);

/// Evolves config.run.input under config.run.multiplier on [0, t_max] and
/// tabulates norms and intertwining residuals per time, plus radial profiles.
CommandOutput cmd_propagate(const RunConfig& config, const OutputOptions& options);

/// Homogeneous and inhomogeneous smoothing with the corollary multipliers of
/// config.run.multiplier, both transfer comparisons and the refinement pass.
CommandOutput cmd_smoothing(const RunConfig& config, const OutputOptions& options);

/// Gain-of-regularity ratios on X and for the transferred 1D data, for every
/// k of config.gain.k, and the k = 0 reduction against the smoothing ratio.
CommandOutput cmd_gain(const RunConfig& config, const OutputOptions& options);

struct SelftestOptions {
  /// Replaces the normalization constant of the c-function (fault injection).
  std::optional<std::complex<double>> corrupt_c0;
};

struct SelftestCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SelftestResult {
  std::vector<SelftestCheck> checks;
  bool pass = true;
  double seconds = 0.0;
};

/// The fast built-in checks (well under a minute).
SelftestResult cmd_selftest(const SelftestOptions& options = {});

std::string usage();

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hypharm::cli
