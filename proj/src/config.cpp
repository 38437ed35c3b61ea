#include "hypharm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hypharm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("expected a real number, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      throw ConfigError("empty list item in '" + v + "'");
    }
    out.push_back(item);
  }
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? "," : "") + items[i];
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.r_max", [](RunConfig& c, const std::string& v) { c.grid.r_max = to_double(v); }},
      {"grid.n_r", [](RunConfig& c, const std::string& v) { c.grid.n_r = to_int(v); }},
      {"grid.n_theta", [](RunConfig& c, const std::string& v) { c.grid.n_theta = to_int(v); }},
      {"grid.lambda_max", [](RunConfig& c, const std::string& v) { c.grid.lambda_max = to_double(v); }},
      {"grid.n_lambda", [](RunConfig& c, const std::string& v) { c.grid.n_lambda = to_int(v); }},
      {"grid.h_max", [](RunConfig& c, const std::string& v) { c.grid.h_max = to_double(v); }},
      {"grid.n_h", [](RunConfig& c, const std::string& v) { c.grid.n_h = to_int(v); }},
      {"grid.n_b", [](RunConfig& c, const std::string& v) { c.grid.n_b = to_int(v); }},
      {"time.t_max", [](RunConfig& c, const std::string& v) { c.time.t_max = to_double(v); }},
      {"time.n_t", [](RunConfig& c, const std::string& v) { c.time.n_t = to_int(v); }},
      {"run.experiment", [](RunConfig& c, const std::string& v) { c.run.experiment = v; }},
      {"run.multiplier", [](RunConfig& c, const std::string& v) { c.run.multiplier = v; }},
      {"run.input", [](RunConfig& c, const std::string& v) { c.run.input = v; }},
      {"run.out", [](RunConfig& c, const std::string& v) { c.run.out = v; }},
      {"run.seed", [](RunConfig& c, const std::string& v) { c.run.seed = to_u64(v); }},
      {"smoothing.delta", [](RunConfig& c, const std::string& v) {
         c.smoothing.estimate.delta = to_double(v);
         if (!(c.smoothing.estimate.delta > 0.5)) {
           throw ConfigError("δ must exceed 1/2 (got " + v + ")");
         }
       }},
      {"smoothing.chi_inner", [](RunConfig& c, const std::string& v) { c.smoothing.estimate.chi_inner = to_double(v); }},
      {"smoothing.chi_outer", [](RunConfig& c, const std::string& v) { c.smoothing.estimate.chi_outer = to_double(v); }},
      {"smoothing.time_horizon",
       [](RunConfig& c, const std::string& v) { c.smoothing.estimate.time_horizon = to_double(v); }},
      {"smoothing.n_t", [](RunConfig& c, const std::string& v) { c.smoothing.estimate.n_t = to_int(v); }},
      {"smoothing.family_size",
       [](RunConfig& c, const std::string& v) { c.smoothing.estimate.family_size = to_int(v); }},
      {"smoothing.n_lambda", [](RunConfig& c, const std::string& v) { c.smoothing.n_lambda = to_int(v); }},
      {"smoothing.families", [](RunConfig& c, const std::string& v) { c.smoothing.families = to_list(v); }},
      {"gain.k", [](RunConfig& c, const std::string& v) {
         c.gain.k.clear();
         for (const auto& item : to_list(v)) {
           c.gain.k.push_back(to_int(item));
         }
       }},
      {"gain.delta", [](RunConfig& c, const std::string& v) {
         c.gain.delta = to_double(v);
         if (!(c.gain.delta > 0.5)) {
           throw ConfigError("δ must exceed 1/2 (got " + v + ")");
         }
       }},
      {"gain.t_max", [](RunConfig& c, const std::string& v) { c.gain.t_max = to_double(v); }},
      {"gain.n_t", [](RunConfig& c, const std::string& v) { c.gain.n_t = to_int(v); }},
      {"gain.width", [](RunConfig& c, const std::string& v) { c.gain.width = to_double(v); }},
  };
  return table;
}

void require_count(const char* name, int n, bool even) {
  if (n < 8) {
    throw ConfigError(std::string(name) + " must be at least 8 (got " + std::to_string(n) + ")");
  }
  if (even && n % 2 != 0) {
    throw ConfigError(std::string(name) + " must be even (got " + std::to_string(n) + ")");
  }
}

void require_positive(const char* name, double v) {
  if (!(v > 0.0)) {
    throw ConfigError(std::string(name) + " must be positive (got " + num(v) + ")");
  }
}

const std::vector<std::string> kExperiments = {"all", "ctable", "transform", "propagate", "smoothing", "gain"};

}  // namespace

void RunConfig::validate() const {
  require_positive("grid.r_max", grid.r_max);
  if (grid.r_max > 12.0) {
    throw ConfigError("grid.r_max must not exceed 12 (got " + num(grid.r_max) + ")");
  }
  require_count("grid.n_r", grid.n_r, true);
  require_count("grid.n_theta", grid.n_theta, false);
  require_positive("grid.lambda_max", grid.lambda_max);
  require_count("grid.n_lambda", grid.n_lambda, false);
  require_positive("grid.h_max", grid.h_max);
  require_count("grid.n_h", grid.n_h, true);
  require_count("grid.n_b", grid.n_b, false);
  if (grid.n_b != grid.n_theta) {
    throw ConfigError("grid.n_b must equal grid.n_theta (" + std::to_string(grid.n_b) + " vs " +
                      std::to_string(grid.n_theta) + ")");
  }
  require_positive("time.t_max", time.t_max);
  require_count("time.n_t", time.n_t, false);
  if (std::find(kExperiments.begin(), kExperiments.end(), run.experiment) == kExperiments.end()) {
    throw ConfigError("run.experiment: unknown experiment '" + run.experiment + "'");
  }
  if (run.out.empty()) {
    throw ConfigError("run.out must not be empty");
  }
  try {
    (void)parse_multiplier(run.multiplier);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("run.multiplier: ") + e.what());
  }
  try {
    smoothing.estimate.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("smoothing: ") + e.what());
  }
  require_count("smoothing.n_t", smoothing.estimate.n_t, true);
  require_count("smoothing.n_lambda", smoothing.n_lambda, false);
  if (smoothing.families.empty()) {
    throw ConfigError("smoothing.families must not be empty");
  }
  for (const auto& f : smoothing.families) {
    const auto& names = shipped_family_names();
    if (f != "random_mix" && std::find(names.begin(), names.end(), f) == names.end()) {
      throw ConfigError("smoothing.families: unknown family '" + f + "'");
    }
  }
  if (!(gain.delta > 0.5)) {
    throw ConfigError("gain.delta: δ must exceed 1/2");
  }
  if (gain.k.empty()) {
    throw ConfigError("gain.k must not be empty");
  }
  for (int k : gain.k) {
    if (k < 0 || k > 4) {
      throw ConfigError("gain.k entries must lie in 0..4 (got " + std::to_string(k) + ")");
    }
  }
  require_positive("gain.t_max", gain.t_max);
  require_count("gain.n_t", gain.n_t, true);
  require_positive("gain.width", gain.width);
}

std::string RunConfig::serialize() const {
  std::ostringstream o;
  o << "[grid]\n"
    << "r_max = " << num(grid.r_max) << "\n"
    << "n_r = " << grid.n_r << "\n"
    << "n_theta = " << grid.n_theta << "\n"
    << "lambda_max = " << num(grid.lambda_max) << "\n"
    << "n_lambda = " << grid.n_lambda << "\n"
    << "h_max = " << num(grid.h_max) << "\n"
    << "n_h = " << grid.n_h << "\n"
    << "n_b = " << grid.n_b << "\n\n";
  o << "[time]\n"
    << "t_max = " << num(time.t_max) << "\n"
    << "n_t = " << time.n_t << "\n\n";
  o << "[run]\n"
    << "experiment = " << run.experiment << "\n"
    << "multiplier = " << run.multiplier << "\n"
    << "input = " << run.input << "\n"
    << "out = " << run.out << "\n"
    << "seed = " << run.seed << "\n\n";
  const auto& s = smoothing.estimate;
  o << "[smoothing]\n"
    << "delta = " << num(s.delta) << "\n"
    << "chi_inner = " << num(s.chi_inner) << "\n"
    << "chi_outer = " << num(s.chi_outer) << "\n"
    << "time_horizon = " << num(s.time_horizon) << "\n"
    << "n_t = " << s.n_t << "\n"
    << "family_size = " << s.family_size << "\n"
    << "n_lambda = " << smoothing.n_lambda << "\n"
    << "families = " << join(smoothing.families) << "\n\n";
  std::vector<std::string> ks;
  for (int k : gain.k) {
    ks.push_back(std::to_string(k));
  }
  o << "[gain]\n"
    << "k = " << join(ks) << "\n"
    << "delta = " << num(gain.delta) << "\n"
    << "t_max = " << num(gain.t_max) << "\n"
    << "n_t = " << gain.n_t << "\n"
    << "width = " << num(gain.width) << "\n";
  return o.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunConfig::hash() const { return fnv1a_hex(serialize()); }

RunConfig RunConfig::refined() const {
  RunConfig r = *this;
  r.grid.n_r *= 2;
  r.grid.n_theta *= 2;
  r.grid.n_lambda *= 2;
  r.grid.n_h *= 2;
  r.grid.n_b *= 2;
  r.time.n_t *= 2;
  r.smoothing.n_lambda *= 2;
  r.smoothing.estimate.n_t *= 2;
  r.smoothing.estimate.time_horizon *= 2.0;
  r.gain.n_t *= 2;
  return r;
}

PolarGrid RunConfig::polar_grid() const { return PolarGrid(grid.r_max, grid.n_r, grid.n_theta); }
SpectralGrid RunConfig::spectral_grid() const { return SpectralGrid(grid.lambda_max, grid.n_lambda, grid.n_b); }
HorocycleGrid RunConfig::horocycle_grid() const { return HorocycleGrid(grid.h_max, grid.n_h, grid.n_b); }
TimeGrid RunConfig::time_grid() const { return TimeGrid(time.t_max, time.n_t % 2 == 0 ? time.n_t : time.n_t + 1); }
SpectralGrid RunConfig::smoothing_spectral_grid() const {
  return SpectralGrid(grid.lambda_max, smoothing.n_lambda, grid.n_b);
}
Multiplier RunConfig::multiplier() const { return parse_multiplier(run.multiplier); }

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "': expected section.key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw ConfigError("override: unknown key '" + key + "'");
  }
  try {
    it->second(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError("override " + key + ": " + e.what());
  }
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  std::map<std::string, int> seen;
  auto fail = [&](const std::string& msg) { throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line.erase(comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail("malformed section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "time" && section != "run" && section != "smoothing" &&
          section != "gain") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail("expected key = value");
    }
    if (section.empty()) {
      fail("key outside of any section");
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      fail("unknown key '" + key + "'");
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      fail("duplicate key '" + key + "' (first set on line " + std::to_string(prev->second) + ")");
    }
    seen[key] = line_no;
    try {
      it->second(config, value);
    } catch (const ConfigError& e) {
      fail(key + ": " + e.what());
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    // Point at the line that set the offending key when there is one.
    const std::string msg = e.what();
    const std::string key = msg.substr(0, msg.find_first_of(" :"));
    const auto it = seen.find(key);
    line_no = it != seen.end() ? it->second : 0;
    if (line_no > 0) {
      fail(msg);
    }
    throw ConfigError(source + ": " + msg);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot read config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace hypharm
