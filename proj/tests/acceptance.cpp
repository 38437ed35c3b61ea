// Acceptance run: one PASS/FAIL line per criterion, tolerances and runtime
// budgets pinned below. Exit status 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hypharm/cli.hpp"
#include "hypharm/config.hpp"
#include "hypharm/estimates.hpp"
#include "hypharm/geometry.hpp"
#include "hypharm/io.hpp"
#include "hypharm/transforms.hpp"
#include "oracles.hpp"

using namespace hypharm;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr double kNormalizationTol = 1e-10;
constexpr double kReciprocityTol = 1e-10;
constexpr double kDensityTol = 1e-8;
// Criterion 2
constexpr double kSymbolLambdaMax = 1e3;
// Criterion 3
constexpr double kPlancherelTol = 5e-3;
constexpr double kHelgasonRoundTripTol = 1e-3;
constexpr double kRadonRoundTripTol = 1e-2;
constexpr double kSliceTol = 1e-3;
constexpr double kAdjointTol = 1e-3;
// Criterion 4
constexpr double kSymmetryTol = 1e-10;
constexpr double kMinOrder = 1.8;
constexpr double kBracketRMax = 20.0;
// Criterion 5
constexpr double kIsometryTol = 5e-3;
constexpr double kFactorizationTol = 1e-3;
constexpr double kIntertwineTol = 1e-3;
// Criterion 6
constexpr double kStabilityPct = 20.0;
constexpr double kTransferSlack = 1.05;
constexpr std::size_t kSmoothingData = 28;
// Criterion 7
constexpr double kGainTransferTol = 1e-2;
constexpr double kGainClosedFormTol = 1e-4;
// Criterion 8
constexpr double kSelftestSeconds = 60.0;

const fs::path kSourceDir = HYPHARM_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

RunConfig default_config() { return load_config((kSourceDir / "configs/default.ini").string()); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hypharm_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

io::CsvTable read_csv(const fs::path& p) {
  std::ifstream in(p);
  return io::read_csv(in);
}

std::size_t column_index(const io::CsvTable& t, const std::string& name) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (t.columns[c] == name) {
      return c;
    }
  }
  throw Error("missing column " + name);
}

double relative_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num2 = 0.0, den2 = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    num2 += std::norm(a[q] - b[q]);
    den2 += std::norm(b[q]);
  }
  return std::sqrt(num2 / den2);
}

void c_function_suite(Outcome& o) {
  const CFunctionEvaluator ev;
  const double norm_err = std::abs(ev.c(Complex(0.0, -ev.root_data().rho())) - 1.0);
  double recip = 0.0;
  for (double l = 1e-3; l <= 1e3 * (1.0 + 1e-12); l *= std::pow(10.0, 0.01)) {
    recip = std::max(recip, std::abs(ev.c(Complex(l, 0.0)) * ev.c_inverse(l) - 1.0));
  }
  const double fitted = ev.plancherel_density(1.0) / std::tanh(kPi);
  double dens = 0.0;
  for (double l = 0.01; l <= 100.0 * (1.0 + 1e-12); l *= std::pow(10.0, 0.01)) {
    dens = std::max(dens, std::abs(ev.plancherel_density(l) / (fitted * l * std::tanh(kPi * l)) - 1.0));
  }
  o.detail << "|c(-i rho)-1|=" << num(norm_err) << " reciprocity=" << num(recip) << " density=" << num(dens)
           << " fitted constant=" << num(fitted);
  o.require(norm_err < kNormalizationTol, "normalization");
  o.require(recip < kReciprocityTol, "reciprocity");
  o.require(dens < kDensityTol, "density");
}

void symbol_suite(Outcome& o) {
  const ExperimentReport r = symbol_estimate_check(CFunctionEvaluator(), 2, kSymbolLambdaMax);
  const double inf = r.details["ellipticity_inf"].get<double>();
  o.detail << "ellipticity inf=" << num(inf);
  for (const auto& order : r.details["orders"]) {
    const bool finite = order["finite"].get<bool>();
    const bool flat = order["no_growth"].get<bool>();
    o.detail << " alpha=" << order["order"].get<int>() << " sup=" << num(order["constant"].get<double>());
    o.require(finite && flat, "order " + std::to_string(order["order"].get<int>()) + " bounded without growth");
  }
  o.require(r.details["orders"].size() == 3, "orders 0..2 present");
  o.require(inf > 0.0, "ellipticity");
}

void transform_suite(Outcome& o) {
  const RunConfig config = default_config();
  const CFunctionEvaluator ev;
  const FunctionOnX u = cli::builtin_input("gaussian_bump", config.polar_grid());
  const double norm = l2_norm(u);
  const FourierImage image = helgason_forward_both(u, config.spectral_grid());
  const double planch = std::max(std::abs(plancherel_norm(image.positive, ev) / norm - 1.0),
                                 std::abs(plancherel_norm(image.negative, ev) / norm - 1.0));
  const double helg = l2_distance(helgason_inverse(image.positive, u.grid, ev), u) / norm;
  const double radon = l2_distance(radon_inverse(u, config.horocycle_grid(), ev), u) / norm;
  const RunConfig fine = config.refined();
  const FunctionOnX u_fine = cli::builtin_input("gaussian_bump", fine.polar_grid());
  const double radon_fine =
      l2_distance(radon_inverse(u_fine, fine.horocycle_grid(), ev), u_fine) / l2_norm(u_fine);
  const HorocycleFunction ru = radon_forward(u, config.horocycle_grid());
  const double slice = relative_distance(radon_to_fourier(ru, config.spectral_grid(), +1).values, image.positive.values);
  const HorocycleGrid& hg = ru.grid;
  HorocycleFunction phi(hg);
  for (int i = 0; i < hg.n_points(); ++i) {
    for (int k = 0; k < hg.n_b(); ++k) {
      phi.at(i, k) = std::exp(-hg.h(i) * hg.h(i)) * (1.0 + 0.5 * std::sin(hg.b(k)));
    }
  }
  const double adj = adjointness_residual(u, phi);
  o.detail << "plancherel=" << num(planch) << " helgason=" << num(helg) << " radon=" << num(radon)
           << " radon(refined)=" << num(radon_fine) << " slice=" << num(slice) << " adjointness=" << num(adj);
  o.require(planch < kPlancherelTol, "Plancherel");
  o.require(helg < kHelgasonRoundTripTol, "Helgason round trip");
  o.require(radon < kRadonRoundTripTol, "Radon round trip");
  o.require(radon_fine < radon, "Radon round trip decreases under refinement");
  o.require(slice < kSliceTol, "projection slice");
  o.require(adj < kAdjointTol, "adjointness");
}

// Observed order from three residuals at successive halvings.
std::pair<double, double> orders(const std::function<double(int)>& residual, int n0) {
  const double e1 = residual(n0), e2 = residual(2 * n0), e3 = residual(4 * n0);
  return {std::log2(e1 / e2), std::log2(e2 / e3)};
}

void spherical_suite(Outcome& o) {
  bool exact = true;
  for (double l : {0.0, 0.5, 3.0, 40.0}) {
    exact = exact && spherical_function(l, 0.0) == Complex(1.0);
  }
  double sym = 0.0;
  for (double l : {0.3, 2.0, 7.0}) {
    for (double r : {0.5, 3.0, 10.0}) {
      sym = std::max(sym, std::abs(spherical_function(l, r) - spherical_function(-l, r)));
    }
  }
  const double lambda = 1.5;
  const double eig = lambda * lambda + 0.25;
  auto interior_residual = [&](const FunctionOnX& u, const LaplacianResult& lap) {
    double err = 0.0;
    for (int i = 0; i < u.grid.n_r(); ++i) {
      if (u.grid.r(i) < 0.5 || u.grid.r(i) > 1.5) {
        continue;
      }
      for (int j = 0; j < u.grid.n_theta(); ++j) {
        err = std::max(err, std::abs(lap.value.at(i, j) + eig * u.at(i, j)));
      }
    }
    return err;
  };
  const BoundaryPoint b(0.0);
  const auto [pw1, pw2] = orders(
      [&](int n) {
        const FunctionOnX u = sample_function(PolarGrid(2.0, n, 2 * n), [&](double r, double th) {
          return std::exp(Complex(0.5, lambda) * busemann(DiscPoint::from_polar(r, th), b));
        });
        return interior_residual(u, laplace_beltrami_apply(u));
      },
      32);
  const auto [sf1, sf2] = orders(
      [&](int n) {
        const FunctionOnX u = sample_radial(PolarGrid(2.0, n, 8), [&](double r) { return spherical_function(lambda, r); });
        return interior_residual(u, laplace_beltrami_apply(u));
      },
      32);
  bool lower = true;
  double c1 = 0.0;
  for (double r = 0.0; r <= kBracketRMax + 1e-9; r += 0.1) {
    const double p = spherical_function(0.0, r).real();
    lower = lower && p >= std::exp(-0.5 * r) * (1.0 - 1e-12);
    c1 = std::max(c1, p * std::exp(0.5 * r) / (1.0 + r));
  }
  o.detail << "phi(0)=1 exact=" << (exact ? "yes" : "no") << " symmetry=" << num(sym) << " order(plane wave)="
           << num(pw1) << "," << num(pw2) << " order(phi_lambda)=" << num(sf1) << "," << num(sf2)
           << " C1=" << num(c1);
  o.require(exact, "phi_lambda(0) = 1");
  o.require(sym < kSymmetryTol, "lambda symmetry");
  o.require(pw1 >= kMinOrder && pw2 >= kMinOrder, "plane-wave Laplacian order");
  o.require(sf1 >= kMinOrder && sf2 >= kMinOrder, "spherical-function Laplacian order");
  o.require(lower, "lower bracket");
  o.require(std::isfinite(c1) && c1 <= 1.0, "upper bracket with C1 <= 1");
}

void isometry_suite(Outcome& o) {
  const RunConfig config = default_config();
  const CFunctionEvaluator ev;
  const FunctionOnX u = cli::builtin_input("gaussian_bump", config.polar_grid());
  const FourierImage image = helgason_forward_both(u, config.spectral_grid());
  const HorocycleGrid hg = config.horocycle_grid();
  const HorocycleFunction tu = isometry_T(image, hg, Chamber::both, ev);
  const double iso = std::abs(horocycle_isometry_norm(tu) / l2_norm(u) - 1.0);
  const HorocycleFunction lr = lambda_op(radon_forward(u, hg), false, ev);
  double diff = 0.0, ref = 0.0;
  for (int i = 0; i < hg.n_points(); ++i) {
    for (int k = 0; k < hg.n_b(); ++k) {
      diff = std::max(diff, std::abs(std::exp(0.5 * hg.h(i)) * lr.at(i, k) - tu.at(i, k)));
      ref = std::max(ref, std::abs(tu.at(i, k)));
    }
  }
  const double fact = diff / ref;
  const HorocycleGrid ig = intertwine_grid(config.spectral_grid());
  double hom = 0.0, sch = 0.0;
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    hom = std::max(hom, intertwine_homogeneous_check(schrodinger_multiplier(), constant_multiplier(1.0), image, t, ig, ev));
    sch = std::max(sch, schrodinger_intertwine_check(image, t, ig, ev));
  }
  o.detail << "isometry=" << num(iso) << " T vs e^{rho H} Lambda R=" << num(fact) << " intertwine(homogeneous)="
           << num(hom) << " intertwine(schroedinger)=" << num(sch);
  o.require(iso < kIsometryTol, "isometry");
  o.require(fact < kFactorizationTol, "T = e^{rho H} Lambda R");
  o.require(hom < kIntertwineTol, "homogeneous intertwining");
  o.require(sch < kIntertwineTol, "Schroedinger intertwining");
}

void smoothing_suite(Outcome& o) {
  RunConfig config = default_config();
  config.run.multiplier = "schrodinger";
  config.smoothing.estimate.delta = 0.6;
  config.smoothing.families = shipped_family_names();
  config.smoothing.estimate.family_size = 7;
  config.validate();
  const fs::path dir = scratch("smoothing");
  cli::OutputOptions options;
  options.out_dir = dir.string();
  const cli::CommandOutput out = cli::cmd_smoothing(config, options);

  const io::CsvTable t = read_csv(dir / "smoothing.csv");
  const auto variant = column_index(t, "variant");
  const auto ratio = column_index(t, "ratio");
  const auto refined = column_index(t, "refined_ratio");
  std::map<std::string, std::size_t> counts;
  double worst_pct = 0.0;
  bool finite = true;
  for (const auto& row : t.rows) {
    ++counts[row[variant]];
    const double a = std::stod(row[ratio]);
    const double b = std::stod(row[refined]);
    finite = finite && std::isfinite(a) && std::isfinite(b) && a > 0.0;
    worst_pct = std::max(worst_pct, 100.0 * std::abs(b - a) / a);
  }
  const io::CsvTable tr = read_csv(dir / "smoothing_transfer.csv");
  const auto used = column_index(tr, "lhs_over_bound");
  const auto tr_variant = column_index(tr, "variant");
  std::map<std::string, double> worst_transfer;
  std::map<std::string, std::size_t> transfer_counts;
  for (const auto& row : tr.rows) {
    worst_transfer[row[tr_variant]] = std::max(worst_transfer[row[tr_variant]], std::stod(row[used]));
    ++transfer_counts[row[tr_variant]];
  }
  o.detail << "data=" << counts["homogeneous"] << "+" << counts["inhomogeneous"] << " max refine change="
           << num(worst_pct) << "% transfer LHS/(sqrt2 C) homogeneous=" << num(worst_transfer["homogeneous"])
           << " inhomogeneous=" << num(worst_transfer["inhomogeneous"]);
  o.require(counts["homogeneous"] == kSmoothingData && counts["inhomogeneous"] == kSmoothingData, "28 data per variant");
  o.require(finite, "finite ratios");
  o.require(worst_pct <= kStabilityPct, "refinement stability");
  for (const char* v : {"homogeneous", "inhomogeneous"}) {
    o.require(transfer_counts[v] == kSmoothingData, std::string(v) + " transfer rows");
    o.require(worst_transfer[v] <= kTransferSlack, std::string(v) + " transfer inequality");
  }
  o.require(out.pass, "command reported success");
}

void gain_suite(Outcome& o) {
  RunConfig config = default_config();
  config.gain.k = {1, 2};
  config.gain.delta = 0.6;
  config.gain.t_max = 2.0;
  config.validate();
  const fs::path dir = scratch("gain");
  cli::OutputOptions options;
  options.out_dir = dir.string();
  cli::cmd_gain(config, options);
  const io::CsvTable t = read_csv(dir / "gain.csv");
  const auto k = t.column("k");
  const auto rel = t.column("relative_difference");
  int covered = 0;
  for (std::size_t q = 0; q < k.size(); ++q) {
    if (k[q] != 1.0 && k[q] != 2.0) {
      continue;
    }
    ++covered;
    o.detail << "k=" << k[q] << " X vs 1D=" << num(rel[q]) << " ";
    o.require(std::isfinite(rel[q]) && rel[q] <= kGainTransferTol, "transfer for k=" + num(k[q]));
  }
  o.require(covered == 2, "k = 1, 2 present");
  const ExperimentReport one_d = gain_regularity_1d(gaussian_1d(1.0, 0.0, 40.0), 1, 0.6, TimeGrid(2.0, 128));
  const double ref = oracle::gain_ratio_gaussian(1.0, 1, 0.6, 2.0);
  const double cf = std::abs(one_d.ratio / ref - 1.0);
  o.detail << "1D Gaussian vs closed form=" << num(cf);
  o.require(cf < kGainClosedFormTol, "closed-form 1D Gaussian");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hypharm");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

void determinism_suite(Outcome& o) {
  const cli::SelftestResult st = cli::cmd_selftest();
  o.detail << "selftest " << (st.pass ? "passed" : "failed") << " in " << num(st.seconds) << " s";
  o.require(st.pass, "selftest");
  o.require(st.seconds < kSelftestSeconds, "selftest runtime");

  const std::string config = (kSourceDir / "configs/default.ini").string();
  auto run_smoothing = [&](const std::string& name) {
    const fs::path dir = scratch(name);
    invoke({"smoothing", "--config", config, "--out", dir.string(), "--seed", "11", "--set", "smoothing.families=random_mix",
            "--set", "grid.n_r=64", "--set", "grid.n_theta=32", "--set", "grid.n_b=32", "--set", "grid.n_lambda=64",
            "--set", "grid.n_h=64", "--set", "smoothing.n_lambda=64", "--set", "smoothing.n_t=16", "--set",
            "smoothing.family_size=3"});
    return dir;
  };
  const fs::path a = run_smoothing("seed_a");
  const fs::path b = run_smoothing("seed_b");
  int files = 0;
  bool identical = true;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() == ".csv") {
      ++files;
      identical = identical && slurp(e.path()) == slurp(b / e.path().filename());
    }
  }
  o.detail << "; " << files << " CSV files " << (identical ? "byte-identical" : "differ");
  o.require(files >= 2 && identical, "byte-identical CSV");

  int rejected = 0;
  for (const char* text : {"[smoothing]\ndelta = 0.5\n", "[smoothing]\ndelta = 0.1\n", "[gain]\ndelta = 0.5\n"}) {
    try {
      parse_config(text, "acceptance");
    } catch (const ConfigError&) {
      ++rejected;
    }
  }
  const fs::path none = scratch("rejected");
  const int code = invoke({"smoothing", "--config", config, "--out", none.string(), "--set", "smoothing.delta=0.5"});
  o.detail << "; delta <= 1/2 rejected " << rejected << "/3, CLI exit " << code;
  o.require(rejected == 3, "parse-time rejection");
  o.require(code == cli::kExitUsage && !fs::exists(none), "CLI rejection before any output");
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 = no runtime budget
  void (*run)(Outcome&);
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "c-function suite", 5.0, c_function_suite},
      {2, "symbol estimates", 10.0, symbol_suite},
      {3, "transform suite", 120.0, transform_suite},
      {4, "spherical and eigenfunction suite", 60.0, spherical_suite},
      {5, "isometry and intertwining", 120.0, isometry_suite},
      {6, "smoothing experiments", 600.0, smoothing_suite},
      {7, "gain of regularity", 300.0, gain_suite},
      {8, "determinism and CLI", 0.0, determinism_suite},
  };
  bool all = true;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0) {
      o.require(secs < c.budget_seconds, "runtime budget");
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail.str()
              << " | " << num(secs) << " s";
    if (c.budget_seconds > 0.0) {
      std::cout << " of " << c.budget_seconds << " s";
    }
    std::cout << std::endl;
  }
  std::cout << (all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << std::endl;
  return all ? 0 : 1;
}
