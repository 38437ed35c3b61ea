#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypharm/common.hpp"
#include "hypharm/estimates.hpp"
#include "hypharm/evolution.hpp"
#include "hypharm/grids.hpp"

namespace hypharm {

/// Invalid configuration; the message starts with "<source>:<line>: " when
/// the problem can be traced to a line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct GridSection {
  double r_max = 3.2;
  int n_r = 256;
  int n_theta = 128;
  double lambda_max = 24.0;
  int n_lambda = 256;
  double h_max = 10.0;
  int n_h = 256;
  int n_b = 128;
};

struct TimeSection {
  double t_max = 2.0;
  int n_t = 8;
};

struct RunSection {
  std::string experiment = "all";
  std::string multiplier = "schrodinger";
  std::string input = "gaussian_bump";
  std::string out = "out";
  std::uint64_t seed = 1;
};

struct SmoothingSection {
  SmoothingConfig estimate{0.6, 1.0, 2.0, 4.0, 128, 7};
  int n_lambda = 512;
  std::vector<std::string> families = {"gaussian", "modulated", "radial_bump", "off_center"};
};

struct GainSection {
  std::vector<int> k = {1, 2};
  double delta = 0.6;
  double t_max = 2.0;
  int n_t = 128;
  double width = 0.6;
};

struct RunConfig {
  GridSection grid;
  TimeSection time;
  RunSection run;
  SmoothingSection smoothing;
  GainSection gain;

  /// Throws ConfigError for counts < 8, r_max > 12, n_b != n_theta, odd
  /// counts where evenness is required, delta <= 1/2 ("δ must exceed 1/2"),
  /// unknown multipliers or families.
  void validate() const;

  /// Canonical INI text; parse_config(serialize()) reproduces the config.
  std::string serialize() const;
  /// 64-bit FNV-1a of serialize(), as 16 hex digits.
  std::string hash() const;
  /// Every grid count doubled; the smoothing horizon doubles as well.
  RunConfig refined() const;

  PolarGrid polar_grid() const;
  SpectralGrid spectral_grid() const;
  HorocycleGrid horocycle_grid() const;
  TimeGrid time_grid() const;
  SpectralGrid smoothing_spectral_grid() const;
  Multiplier multiplier() const;
};

/// Parses INI text ("[section]", "key = value", '#' or ';' comments). Keys
/// absent from the text keep their defaults. Unknown sections or keys and
/// malformed values are errors reported as "<source>:<line>: ...".
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

/// Applies one "section.key=value" override (as given on the command line).
void apply_override(RunConfig& config, const std::string& assignment);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

}  // namespace hypharm
