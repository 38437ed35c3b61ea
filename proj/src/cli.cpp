#include "hypharm/cli.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypharm/estimates.hpp"
#include "hypharm/evolution.hpp"
#include "hypharm/geometry.hpp"
#include "hypharm/io.hpp"
#include "hypharm/specialfn.hpp"
#include "hypharm/transforms.hpp"

namespace hypharm::cli {

namespace {

namespace fs = std::filesystem;
using io::CsvTable;
using io::format_number;

// Runs f(0..n-1) on up to `jobs` threads; results keep index order.
template <typename F>
auto fan_out(int n, int jobs, F f) -> std::vector<decltype(f(0))> {
  std::vector<decltype(f(0))> results(static_cast<std::size_t>(n));
  if (jobs <= 0) {
    jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) {
      results[static_cast<std::size_t>(i)] = f(i);
    }
    return results;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          results[static_cast<std::size_t>(i)] = f(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return results;
}

class Writer {
 public:
  Writer(const RunConfig& config, const OutputOptions& options, CommandOutput& out)
      : config_(config), options_(options), out_(out), dir_(options.out_dir) {}

  void csv(const std::string& name, const CsvTable& table) {
    const fs::path p = dir_ / name;
    io::write_csv_file(p, table);
    out_.files.push_back(p.string());
  }

  void svg(const std::string& name, const std::string& text) {
    if (!options_.svg) {
      return;
    }
    const fs::path p = dir_ / name;
    io::write_text_file(p, text);
    out_.files.push_back(p.string());
  }

  void json(const std::string& name) {
    if (!options_.json) {
      return;
    }
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : out_.reports) {
      auto j = to_json(r, config_.hash(), options_.timestamp);
      reports.push_back(std::move(j));
    }
    nlohmann::json doc = {{"schema", kReportSchema},
                          {"tool_version", kToolVersion},
                          {"config_hash", config_.hash()},
                          {"config", config_.serialize()},
                          {"pass", out_.pass},
                          {"reports", reports}};
    if (!options_.timestamp.empty()) {
      doc["timestamp"] = options_.timestamp;
    }
    const fs::path p = dir_ / name;
    io::write_text_file(p, doc.dump(2) + "\n");
    out_.files.push_back(p.string());
  }

 private:
  const RunConfig& config_;
  const OutputOptions& options_;
  CommandOutput& out_;
  fs::path dir_;
};

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& z : v) {
    m = std::max(m, std::abs(z));
  }
  return m;
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Multiplier bracket_half_multiplier() {
  Multiplier m;
  m.name = "<lambda>^1/2";
  m.value = [](double l) { return std::pow(bracket(l), 0.5); };
  m.derivative = [](double l) { return 0.5 * l * std::pow(bracket(l), -1.5); };
  m.growth_constant = 1.0;
  m.growth_order = 0.5;
  return m;
}

std::vector<FamilyMember> config_families(const RunConfig& config, const PolarGrid& grid) {
  std::vector<FamilyMember> all;
  const int size = config.smoothing.estimate.family_size;
  for (const auto& name : config.smoothing.families) {
    auto fam = name == "random_mix" ? random_mix_family(grid, size, config.run.seed) : make_family(name, grid, size);
    all.insert(all.end(), fam.begin(), fam.end());
  }
  return all;
}

FunctionOnX load_input(const RunConfig& config, const PolarGrid& grid) {
  const auto& names = builtin_inputs();
  if (std::find(names.begin(), names.end(), config.run.input) != names.end()) {
    return builtin_input(config.run.input, grid);
  }
  std::ifstream f(config.run.input, std::ios::binary);
  if (!f) {
    throw Error("input '" + config.run.input + "' is neither a built-in nor a readable file");
  }
  return io::read_function(f);
}

}  // namespace

const std::vector<std::string>& builtin_inputs() {
  static const std::vector<std::string> names{"gaussian_bump", "zero", "radial_bump", "radial_gaussian",
                                              "off_center"};
  return names;
}

FunctionOnX builtin_input(const std::string& name, const PolarGrid& grid) {
  if (name == "gaussian_bump") {
    return sample_function(grid, [](double r, double th) {
      const double x = std::tanh(r / 2) * std::cos(th);
      const double y = std::tanh(r / 2) * std::sin(th);
      return Complex(std::exp(-2.0 * r * r) * (1.0 + 0.6 * x + 2.0 * x * y));
    });
  }
  if (name == "zero") {
    return FunctionOnX(grid);
  }
  if (name == "radial_bump") {
    return sample_radial(grid, [](double r) {
      const double x = r / 1.5;
      return Complex(x < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0);
    });
  }
  if (name == "radial_gaussian") {
    return sample_radial(grid, [](double r) { return Complex(std::exp(-2.0 * r * r)); });
  }
  if (name == "off_center") {
    const DiscPoint center = DiscPoint::from_polar(0.5, 1.0);
    return sample_function(grid, [center](double r, double th) {
      const double d = hyperbolic_distance(DiscPoint::from_polar(r, th), center) / 0.4;
      return Complex(std::exp(-d * d));
    });
  }
  throw DomainError("unknown built-in input '" + name + "'");
}

CommandOutput cmd_ctable(const RunConfig& config, const OutputOptions& options) {
  CommandOutput out;
  Writer writer(config, options, out);
  const CFunctionEvaluator ev;
  const double rho = ev.root_data().rho();
  const double half_dim = 0.5 * ev.root_data().dim_n();
  const double fitted = ev.plancherel_density(1.0) / std::tanh(kPi);

  CsvTable t{{"kind", "lambda_re", "lambda_im", "c_re", "c_im", "density", "reference", "relative_deviation",
              "symbol_0", "symbol_1", "symbol_2"},
             {}};
  const Complex normalization = ev.c(Complex(0.0, -rho));
  const double normalization_error = std::abs(normalization - 1.0);
  t.add_row({"normalization", format_number(0.0), format_number(-rho), format_number(normalization.real()),
             format_number(normalization.imag()), "", "", "", "", "", ""});

  double max_dev = 0.0;
  std::vector<double> xs, density, reference;
  const int n = config.grid.n_lambda;
  const double dl = config.grid.lambda_max / n;
  for (int j = 0; j <= n; ++j) {
    const double l = j * dl;
    Complex c{std::numeric_limits<double>::infinity(), 0.0};
    try {
      c = ev.c(Complex(l, 0.0));
    } catch (const PoleError&) {
      // lambda = 0: pole of c, zero of the density.
    }
    const double d = ev.plancherel_density(l);
    const double ref = fitted * l * std::tanh(kPi * l);
    const double dev = ref > 0.0 ? std::abs(d / ref - 1.0) : std::abs(d);
    if (l >= 0.01) {
      max_dev = std::max(max_dev, dev);
    }
    const double h = symbol_fd_step(l);
    const double s0 = std::abs(ev.c_inverse(l)) * std::pow(bracket(l), -half_dim);
    const double d1 = std::abs(ev.c_inverse_derivative(l));
    const double d2 = std::abs(ev.c_inverse_derivative(l + h) - ev.c_inverse_derivative(l - h)) / (2.0 * h);
    t.add_row({"grid", format_number(l), format_number(0.0), format_number(c.real()), format_number(c.imag()),
               format_number(d), format_number(ref), format_number(dev), format_number(s0),
               format_number(d1 * std::pow(bracket(l), 1.0 - half_dim)),
               format_number(d2 * std::pow(bracket(l), 2.0 - half_dim))});
    xs.push_back(l);
    density.push_back(d);
    reference.push_back(ref);
  }
  writer.csv("ctable.csv", t);
  writer.svg("ctable.svg", io::svg_line_chart("Plancherel density", "lambda", "density",
                                              {{"|c|^-2", xs, density}, {"C lambda tanh(pi lambda)", xs, reference}}));

  ExperimentReport r;
  r.experiment = "ctable";
  r.paper_ref = "c-function closed form";
  r.grid_meta = {{"lambda_max", config.grid.lambda_max}, {"n_lambda", n}};
  r.family = "c_function";
  r.lhs = normalization_error;
  r.rhs = max_dev;
  r.ratio = fitted;
  r.pass = normalization_error < 1e-10 && max_dev < 1e-8;
  r.details = {{"normalization_re", normalization.real()},
               {"normalization_im", normalization.imag()},
               {"normalization_error", normalization_error},
               {"density_fit_constant", fitted},
               {"max_relative_deviation", max_dev}};
  out.reports.push_back(r);
  out.pass = r.pass;
  out.messages.push_back("ctable: |c(-i rho) - 1| = " + format_number(normalization_error) +
                         ", max density deviation = " + format_number(max_dev));
  writer.json("ctable.json");
  return out;
}

CommandOutput cmd_transform(const RunConfig& config, const OutputOptions& options) {
  CommandOutput out;
  Writer writer(config, options, out);
  const CFunctionEvaluator ev;
  const PolarGrid pg = config.polar_grid();
  const SpectralGrid sg = config.spectral_grid();
  const HorocycleGrid hg = config.horocycle_grid();
  const FunctionOnX u = load_input(config, pg);
  if (u.grid.n_theta() != sg.n_b()) {
    throw GridError("transform: input n_theta must equal grid.n_b");
  }
  Warnings warnings;
  const double norm = l2_norm(u);

  struct Metric {
    std::string name;
    double value;
    double tolerance;
  };
  std::vector<Metric> metrics;
  metrics.push_back({"l2_norm", norm, std::numeric_limits<double>::infinity()});

  const FourierImage image = helgason_forward_both(u, sg, &warnings);
  const double p_pos = plancherel_norm(image.positive, ev);
  const double p_neg = plancherel_norm(image.negative, ev);
  metrics.push_back({"plancherel_norm", p_pos, std::numeric_limits<double>::infinity()});
  metrics.push_back({"plancherel_defect", norm > 0 ? std::abs(p_pos / norm - 1.0) : p_pos, 5e-3});
  metrics.push_back({"plancherel_defect_negative", norm > 0 ? std::abs(p_neg / norm - 1.0) : p_neg, 5e-3});

  const FunctionOnX back = helgason_inverse(image.positive, u.grid, ev, &warnings);
  metrics.push_back({"helgason_roundtrip", relative(l2_distance(back, u), norm), 1e-3});

  const FunctionOnX radon_back = radon_inverse(u, hg, ev, {}, &warnings);
  metrics.push_back({"radon_roundtrip", relative(l2_distance(radon_back, u), norm), 1e-2});

  const HorocycleFunction ru = radon_forward(u, hg, {}, &warnings);
  const SpectralTable slice = radon_to_fourier(ru, sg, +1);
  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < slice.values.size(); ++q) {
    num += std::norm(slice.values[q] - image.positive.values[q]);
    den += std::norm(image.positive.values[q]);
  }
  metrics.push_back({"projection_slice", den > 0 ? std::sqrt(num / den) : std::sqrt(num), 1e-3});

  HorocycleFunction phi(hg);
  for (int i = 0; i < hg.n_points(); ++i) {
    for (int k = 0; k < hg.n_b(); ++k) {
      const double h = hg.h(i);
      phi.at(i, k) = std::exp(-h * h) * (1.0 + 0.5 * std::sin(hg.b(k)));
    }
  }
  {
    const Complex xi_side = horocycle_pairing(ru, phi);
    const Complex x_side = integrate_product(u, dual_radon(phi, u.grid, &warnings));
    metrics.push_back({"adjointness", relative(std::abs(xi_side - x_side), std::abs(x_side)), 1e-3});
  }

  const HorocycleFunction tu = isometry_T(image, hg, Chamber::both, ev, &warnings);
  const double t_norm = horocycle_isometry_norm(tu);
  metrics.push_back({"isometry_defect", norm > 0 ? std::abs(t_norm / norm - 1.0) : t_norm, 5e-3});
  const HorocycleFunction lr = lambda_op(ru, false, ev, &warnings);
  double diff = 0.0, ref = 0.0;
  for (int i = 0; i < hg.n_points(); ++i) {
    for (int k = 0; k < hg.n_b(); ++k) {
      diff = std::max(diff, std::abs(std::exp(0.5 * hg.h(i)) * lr.at(i, k) - tu.at(i, k)));
      ref = std::max(ref, std::abs(tu.at(i, k)));
    }
  }
  metrics.push_back({"T_vs_lambda_radon", relative(diff, ref), 1e-3});

  double b_var = 0.0;
  const double fmax = max_abs(image.positive.values);
  for (int j = 0; j < sg.n_lambda(); ++j) {
    for (int k = 1; k < sg.n_b(); ++k) {
      b_var = std::max(b_var, std::abs(image.positive.at(j, k) - image.positive.at(j, 0)));
    }
  }
  metrics.push_back({"b_variation", relative(b_var, fmax), std::numeric_limits<double>::infinity()});

  CsvTable t{{"metric", "value", "tolerance", "pass"}, {}};
  bool pass = true;
  for (const auto& m : metrics) {
    const bool ok = std::isfinite(m.value) && m.value <= m.tolerance;
    pass = pass && ok;
    t.add_row({m.name, format_number(m.value), std::isfinite(m.tolerance) ? format_number(m.tolerance) : "",
               ok ? "1" : "0"});
  }
  writer.csv("transform.csv", t);

  CsvTable s{{"lambda", "abs_forward", "abs_slice"}, {}};
  std::vector<double> xs, fa, sa;
  for (int j = 0; j < sg.n_lambda(); ++j) {
    xs.push_back(sg.lambda(j));
    fa.push_back(std::abs(image.positive.at(j, 0)));
    sa.push_back(std::abs(slice.at(j, 0)));
    s.add_row({xs.back(), fa.back(), sa.back()});
  }
  writer.csv("transform_slice.csv", s);
  writer.svg("transform_slice.svg", io::svg_line_chart("Fourier image at b = 0", "lambda", "|F u|",
                                                       {{"forward", xs, fa}, {"projection slice", xs, sa}}, true));

  ExperimentReport r;
  r.experiment = "transform";
  r.paper_ref = "Helgason transform, Radon transform and isometry T";
  r.grid_meta = {{"r_max", pg.r_max()}, {"n_r", pg.n_r()}, {"n_theta", pg.n_theta()}, {"lambda_max", sg.lambda_max()},
                 {"n_lambda", sg.n_lambda()}, {"h_max", hg.h_max()}, {"n_h", hg.n_h()}, {"n_b", hg.n_b()}};
  r.family = config.run.input;
  r.lhs = p_pos;
  r.rhs = norm;
  r.ratio = safe_ratio(p_pos, norm);
  r.warnings = warnings;
  r.pass = pass;
  for (const auto& m : metrics) {
    r.details[m.name] = m.value;
  }
  out.reports.push_back(r);
  out.pass = pass;
  for (const auto& m : metrics) {
    out.messages.push_back("transform: " + m.name + " = " + format_number(m.value));
  }
  writer.json("transform.json");
  return out;
}

CommandOutput cmd_propagate(const RunConfig& config, const OutputOptions& options) {
  CommandOutput out;
  Writer writer(config, options, out);
  const CFunctionEvaluator ev;
  const PolarGrid pg = config.polar_grid();
  const SpectralGrid sg = config.spectral_grid();
  const HorocycleGrid ig = intertwine_grid(sg);
  const Multiplier a = config.multiplier();
  const bool schrodinger = config.run.multiplier == "schrodinger";
  const double delta = config.smoothing.estimate.delta;
  Warnings warnings;
  const FunctionOnX u = load_input(config, pg);
  const FourierImage image = helgason_forward_both(u, sg, &warnings);
  const double n0 = state_norm(image, ev);
  const Multiplier one = constant_multiplier(1.0);

  const int n = config.time.n_t;
  struct Row {
    double t, norm, weighted_minus, weighted_plus, intertwine, schrodinger;
  };
  const auto rows = fan_out(n + 1, options.jobs, [&](int i) {
    const double t = config.time.t_max * i / n;
    const EvolutionState st = propagate(a, t, image);
    Warnings local;
    Row r{t, state_norm(st.snapshot, ev), weighted_norm(st.snapshot, -delta, ev, &local).norm,
          weighted_norm(st.snapshot, delta, ev, &local).norm,
          intertwine_homogeneous_check(a, one, image, t, ig, ev, &local),
          schrodinger ? schrodinger_intertwine_check(image, t, ig, ev, &local)
                      : std::numeric_limits<double>::quiet_NaN()};
    return r;
  });

  CsvTable t{{"t", "plancherel_norm", "norm_ratio", "weighted_norm_minus", "weighted_norm_plus",
              "intertwine_residual", "schrodinger_residual"},
             {}};
  bool pass = true;
  double worst_unitarity = 0.0, worst_intertwine = 0.0;
  std::vector<double> ts, ratio, wm, res;
  for (const auto& r : rows) {
    const double nr = n0 > 0 ? r.norm / n0 : r.norm;
    worst_unitarity = std::max(worst_unitarity, n0 > 0 ? std::abs(nr - 1.0) : r.norm);
    worst_intertwine = std::max(worst_intertwine, r.intertwine);
    if (schrodinger) {
      worst_intertwine = std::max(worst_intertwine, r.schrodinger);
    }
    t.add_row({r.t, r.norm, nr, r.weighted_minus, r.weighted_plus, r.intertwine, r.schrodinger});
    ts.push_back(r.t);
    ratio.push_back(nr);
    wm.push_back(r.weighted_minus);
    res.push_back(r.intertwine);
  }
  pass = worst_unitarity <= 1e-12 && worst_intertwine < 1e-3;
  writer.csv("propagate.csv", t);
  writer.svg("propagate.svg", io::svg_line_chart("Norms along the flow", "t", "norm",
                                                 {{"Plancherel / initial", ts, ratio}, {"L2,-delta", ts, wm}}));
  writer.svg("propagate_residual.svg",
             io::svg_line_chart("Intertwining residual", "t", "residual", {{"homogeneous", ts, res}}, true));

  // Radial profiles along theta = 0 at three snapshot times.
  CsvTable prof{{"t", "r", "abs_u"}, {}};
  std::vector<io::SvgSeries> series;
  for (double frac : {0.0, 0.5, 1.0}) {
    const double time = frac * config.time.t_max;
    const FunctionOnX v = materialize(propagate(a, time, image), pg, ev, &warnings);
    io::SvgSeries s{"t = " + format_number(time), {}, {}};
    for (int i = 0; i < pg.n_r(); ++i) {
      s.x.push_back(pg.r(i));
      s.y.push_back(std::abs(v.at(i, 0)));
      prof.add_row({time, pg.r(i), s.y.back()});
    }
    series.push_back(std::move(s));
  }
  writer.csv("propagate_profiles.csv", prof);
  writer.svg("propagate_profiles.svg", io::svg_line_chart("|u(t)| along theta = 0", "r", "|u|", series));

  ExperimentReport r;
  r.experiment = "propagate";
  r.paper_ref = "multiplier flow e^{i t a(D)}";
  r.grid_meta = {{"lambda_max", sg.lambda_max()}, {"n_lambda", sg.n_lambda()}, {"n_b", sg.n_b()},
                 {"t_max", config.time.t_max},     {"n_t", n},                 {"check_h_max", ig.h_max()},
                 {"check_n_h", ig.n_h()}};
  r.family = config.run.input;
  r.lhs = worst_unitarity;
  r.rhs = worst_intertwine;
  r.ratio = n0;
  r.warnings = warnings;
  r.pass = pass;
  r.details = {{"multiplier", a.name}, {"max_unitarity_defect", worst_unitarity},
               {"max_intertwine_residual", worst_intertwine}};
  out.reports.push_back(r);
  out.pass = pass;
  out.messages.push_back("propagate: max unitarity defect " + format_number(worst_unitarity) +
                         ", max intertwining residual " + format_number(worst_intertwine));
  writer.json("propagate.json");
  return out;
}

namespace {

struct SmoothingRun {
  std::vector<FamilyMember> family;
  std::vector<FourierImage> images;
  std::vector<EstimateResult> homogeneous;
  std::vector<EstimateResult> inhomogeneous;
};

// One forward batch for every member; the time integrals fan out per family.
SmoothingRun run_smoothing(const RunConfig& config, const Multiplier& a, const Multiplier& p, const Multiplier& q,
                           int jobs, Warnings* warnings) {
  const CFunctionEvaluator ev;
  const auto& cfg = config.smoothing.estimate;
  SmoothingRun run;
  run.family = config_families(config, config.polar_grid());
  run.images = family_images(run.family, config.smoothing_spectral_grid(), warnings);
  std::vector<std::size_t> starts{0};
  for (std::size_t m = 1; m < run.family.size(); ++m) {
    if (run.family[m].family != run.family[m - 1].family) {
      starts.push_back(m);
    }
  }
  starts.push_back(run.family.size());
  struct Part {
    std::vector<EstimateResult> hom, inh;
    Warnings w;
  };
  const auto parts = fan_out(static_cast<int>(starts.size()) - 1, jobs, [&](int f) {
    const auto lo = static_cast<std::ptrdiff_t>(starts[static_cast<std::size_t>(f)]);
    const auto hi = static_cast<std::ptrdiff_t>(starts[static_cast<std::size_t>(f) + 1]);
    const std::vector<FamilyMember> fam(run.family.begin() + lo, run.family.begin() + hi);
    const std::vector<FourierImage> images(run.images.begin() + lo, run.images.begin() + hi);
    Part part;
    part.hom = smoothing_homogeneous(a, p, fam, images, cfg, ev, &part.w);
    part.inh = smoothing_inhomogeneous(a, q, separable_data(fam), images, cfg, ev, &part.w);
    return part;
  });
  for (const auto& part : parts) {
    run.homogeneous.insert(run.homogeneous.end(), part.hom.begin(), part.hom.end());
    run.inhomogeneous.insert(run.inhomogeneous.end(), part.inh.begin(), part.inh.end());
    for (const auto& w : part.w) {
      warn(warnings, w);
    }
  }
  return run;
}

}  // namespace

CommandOutput cmd_smoothing(const RunConfig& config, const OutputOptions& options) {
  CommandOutput out;
  Writer writer(config, options, out);
  const CFunctionEvaluator ev;
  const Multiplier a = config.multiplier();
  const auto [p, q] = corollary_multipliers(a);
  Warnings warnings;
  const SmoothingRun base = run_smoothing(config, a, p, q, options.jobs, &warnings);
  const RunConfig fine = config.refined();
  Warnings fine_warnings;
  const SmoothingRun refined = run_smoothing(fine, a, p, q, options.jobs, &fine_warnings);

  const auto& cfg = config.smoothing.estimate;
  ExperimentReport transfer_h = transfer_comparison(a, p, base.family, base.images, cfg, ev);
  ExperimentReport transfer_i =
      transfer_comparison_inhomogeneous(a, q, separable_data(base.family), base.images, cfg, ev);

  CsvTable table{{"variant", "family", "member", "lhs", "rhs", "ratio", "refined_ratio", "delta_pct", "stable"}, {}};
  CsvTable profile{{"variant", "family", "member", "t", "integrand"}, {}};
  bool pass = true;
  std::vector<std::string> failures;
  auto add_variant = [&](const std::string& variant, const std::vector<EstimateResult>& b,
                         const std::vector<EstimateResult>& f) {
    std::map<std::string, ExperimentReport> per_family;
    std::vector<std::string> order;
    for (std::size_t m = 0; m < b.size(); ++m) {
      const auto& r = b[m];
      const StabilityInfo st = refinement_stability(r.ratio, f[m].ratio);
      const bool stable = std::isfinite(r.ratio) && is_stable(st);
      if (!stable) {
        pass = false;
        failures.push_back("refinement instability in " + variant + " " + r.family_id + "[" +
                           std::to_string(r.member) + "]: base ratio " + format_number(r.ratio) +
                           ", refined ratio " + format_number(f[m].ratio));
      }
      table.add_row({variant, r.family_id, std::to_string(r.member), format_number(r.lhs_norm),
                     format_number(r.rhs_norm), format_number(r.ratio), format_number(f[m].ratio),
                     format_number(st.delta_pct), stable ? "1" : "0"});
      const TimeGrid tg = config.smoothing.estimate.time_grid();
      for (int i = 0; i < tg.n_points(); ++i) {
        profile.add_row({variant, r.family_id, std::to_string(r.member), format_number(tg.t(i)),
                         format_number(r.time_profile[static_cast<std::size_t>(i)])});
      }
      if (!per_family.count(r.family_id)) {
        order.push_back(r.family_id);
        ExperimentReport rep;
        rep.experiment = "smoothing_" + variant;
        rep.paper_ref = variant == "homogeneous" ? "time-global smoothing estimate, homogeneous solutions"
                                                 : "time-global smoothing estimate, Duhamel term";
        rep.grid_meta = r.grid_meta;
        rep.family = r.family_id;
        rep.details["members"] = nlohmann::json::array();
        rep.ratio = -1.0;
        per_family[r.family_id] = rep;
      }
      auto& rep = per_family[r.family_id];
      rep.details["members"].push_back(
          {{"member", r.member}, {"lhs", r.lhs_norm}, {"rhs", r.rhs_norm}, {"ratio", r.ratio},
           {"refined_ratio", f[m].ratio}, {"delta_pct", st.delta_pct}, {"stable", stable}});
      rep.pass = rep.pass && stable;
      rep.warnings.insert(rep.warnings.end(), r.warnings.begin(), r.warnings.end());
      if (r.ratio > rep.ratio) {
        rep.ratio = r.ratio;
        rep.lhs = r.lhs_norm;
        rep.rhs = r.rhs_norm;
        rep.stability = st;
      }
    }
    for (const auto& name : order) {
      out.reports.push_back(per_family[name]);
    }
  };
  add_variant("homogeneous", base.homogeneous, refined.homogeneous);
  add_variant("inhomogeneous", base.inhomogeneous, refined.inhomogeneous);

  CsvTable transfer{{"variant", "member", "lhs_x", "c_1d", "bound", "lhs_over_bound", "pass"}, {}};
  for (const auto* rep : {&transfer_h, &transfer_i}) {
    const std::string variant = rep == &transfer_h ? "homogeneous" : "inhomogeneous";
    for (const auto& m : rep->details["members"]) {
      transfer.add_row({variant, m["member"].get<std::string>(), format_number(m["lhs_x"].get<double>()),
                        format_number(m["c_1d"].get<double>()), format_number(m["bound"].get<double>()),
                        format_number(m["lhs_over_bound"].get<double>()), m["pass"].get<bool>() ? "1" : "0"});
    }
    if (!rep->pass) {
      pass = false;
      failures.push_back(rep->experiment + ": transfer inequality fails (worst LHS/bound " +
                         format_number(rep->ratio) + ")");
    }
    out.reports.push_back(*rep);
  }
  writer.csv("smoothing.csv", table);
  writer.csv("smoothing_profile.csv", profile);
  writer.csv("smoothing_transfer.csv", transfer);

  std::vector<io::SvgSeries> series;
  for (const auto& name : config.smoothing.families) {
    io::SvgSeries s{name, {}, {}};
    for (const auto& r : base.homogeneous) {
      if (r.family_id == name) {
        s.x.push_back(r.member);
        s.y.push_back(r.ratio);
      }
    }
    series.push_back(std::move(s));
  }
  writer.svg("smoothing.svg", io::svg_line_chart("Homogeneous smoothing ratios", "member", "ratio", series));

  out.pass = pass;
  out.messages = failures;
  out.messages.push_back("smoothing: " + std::to_string(base.homogeneous.size()) + " homogeneous and " +
                         std::to_string(base.inhomogeneous.size()) + " inhomogeneous data, " +
                         (pass ? "all checks pass" : "FAILED"));
  writer.json("smoothing.json");
  return out;
}

CommandOutput cmd_gain(const RunConfig& config, const OutputOptions& options) {
  CommandOutput out;
  Writer writer(config, options, out);
  const CFunctionEvaluator ev;
  const PolarGrid pg = config.polar_grid();
  const SpectralGrid sg = config.smoothing_spectral_grid();
  const TimeGrid tg(config.gain.t_max, config.gain.n_t);
  const double w = config.gain.width;
  const FunctionOnX phi = normalized(sample_radial(pg, [w](double r) { return Complex(std::exp(-(r / w) * (r / w))); }));

  std::vector<int> ks = config.gain.k;
  const auto reports = fan_out(static_cast<int>(ks.size()), options.jobs, [&](int i) {
    return gain_regularity_X(phi, ks[static_cast<std::size_t>(i)], config.gain.delta, tg, sg, ev);
  });

  CsvTable table{{"k", "lhs", "rhs", "ratio_x", "ratio_1d", "relative_difference", "continuous_ratio"}, {}};
  CsvTable profile{{"k", "t", "integrand"}, {}};
  std::vector<io::SvgSeries> series;
  bool pass = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto& r = reports[i];
    pass = pass && r.pass;
    table.add_row({std::to_string(ks[i]), format_number(r.lhs), format_number(r.rhs), format_number(r.ratio),
                   format_number(r.details["ratio_1d"].get<double>()),
                   format_number(r.details["relative_difference"].get<double>()),
                   format_number(r.details["continuous_ratio"].get<double>())});
    const auto prof = r.details["time_profile"].get<std::vector<double>>();
    io::SvgSeries s{"k = " + std::to_string(ks[i]), {}, {}};
    for (int j = 0; j < tg.n_points(); ++j) {
      profile.add_row({std::to_string(ks[i]), format_number(tg.t(j)),
                       format_number(prof[static_cast<std::size_t>(j)])});
      s.x.push_back(tg.t(j));
      s.y.push_back(prof[static_cast<std::size_t>(j)]);
    }
    series.push_back(std::move(s));
    out.reports.push_back(r);
    out.messages.push_back("gain k=" + std::to_string(ks[i]) + ": ratio " + format_number(r.ratio) + " vs 1D " +
                           format_number(r.details["ratio_1d"].get<double>()));
  }

  // k = 0 reduces to the homogeneous smoothing estimate with p = <lambda>^{1/2}.
  const ExperimentReport zero = gain_regularity_X(phi, 0, config.gain.delta, tg, sg, ev);
  SmoothingConfig cfg = config.smoothing.estimate;
  cfg.delta = config.gain.delta;
  cfg.time_horizon = config.gain.t_max;
  cfg.n_t = config.gain.n_t;
  const auto smooth = smoothing_homogeneous(schrodinger_multiplier(), bracket_half_multiplier(),
                                            {FamilyMember{"gain_input", 0, phi}}, cfg, sg, ev);
  const double rel = std::abs(zero.ratio / smooth.front().ratio - 1.0);
  ExperimentReport red;
  red.experiment = "gain_k0_vs_smoothing";
  red.paper_ref = "gain of regularity with k = 0";
  red.grid_meta = zero.grid_meta;
  red.family = "gain_input";
  red.lhs = zero.ratio;
  red.rhs = smooth.front().ratio;
  red.ratio = rel;
  red.pass = std::isfinite(rel) && rel <= 0.01;
  pass = pass && red.pass;
  table.add_row({"0", format_number(zero.lhs), format_number(zero.rhs), format_number(zero.ratio),
                 format_number(smooth.front().ratio), format_number(rel),
                 format_number(zero.details["continuous_ratio"].get<double>())});
  out.reports.push_back(red);
  out.messages.push_back("gain k=0 vs smoothing: relative difference " + format_number(rel));

  writer.csv("gain.csv", table);
  writer.csv("gain_profile.csv", profile);
  writer.svg("gain_profile.svg", io::svg_line_chart("Gain-of-regularity integrand", "t", "integrand", series));
  out.pass = pass;
  writer.json("gain.json");
  return out;
}

SelftestResult cmd_selftest(const SelftestOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SelftestResult result;
  auto check = [&](const std::string& name, double value, double tol, const std::string& detail = {}) {
    const bool ok = std::isfinite(value) && value <= tol;
    result.checks.push_back({name, ok, value, tol, detail});
    result.pass = result.pass && ok;
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      result.checks.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what()});
      result.pass = false;
    }
  };

  CFunctionEvaluator ev;
  if (options.corrupt_c0) {
    ev = ev.with_c0(*options.corrupt_c0);
  }
  const double rho = ev.root_data().rho();

  guarded("specialfn", [&] {
    check("log_gamma(1) = 0", std::abs(log_gamma(1.0)), 1e-14);
    check("log_gamma(1/2) = log sqrt(pi)", std::abs(log_gamma(0.5) - 0.5 * std::log(kPi)), 1e-14);
    check("s(xi; a, a) = 1", std::abs(gamma_ratio_s(3.7, 1.3, 1.3) - 1.0), 1e-14);
    check("s(0; 3/2, 1/2) = 1/2", std::abs(gamma_ratio_s(0.0, 1.5, 0.5) - 0.5), 1e-14);
    check("t(xi; a, a) = 0", std::abs(gamma_ratio_t(2.0, 0.75, 0.75).value), 0.0);
    check("normalization c(-i rho) = 1", std::abs(ev.c(Complex(0.0, -rho)) - 1.0), 1e-10);
    check("reciprocity c c^-1 = 1 at lambda = 1", std::abs(ev.c(Complex(1.0, 0.0)) * ev.c_inverse(1.0) - 1.0), 1e-10);
    check("c^-1(0) = 0", std::abs(ev.c_inverse(0.0)), 0.0);
    check("density(0) = 0", std::abs(ev.plancherel_density(0.0)), 0.0);
    double even = 0.0, dev = 0.0;
    const double fitted = ev.plancherel_density(1.0) / std::tanh(kPi);
    for (double l = 0.01; l <= 100.0; l *= 1.25) {
      even = std::max(even, std::abs(ev.plancherel_density(l) - ev.plancherel_density(-l)) / ev.plancherel_density(l));
      dev = std::max(dev, std::abs(ev.plancherel_density(l) / (fitted * l * std::tanh(kPi * l)) - 1.0));
    }
    check("density even", even, 1e-14);
    check("density proportional to lambda tanh(pi lambda)", dev, 1e-8);
    const ExperimentReport unit = symbol_estimate_check(CFunctionEvaluator::unit_symbol(), 2, 16.0, 8);
    double worst = std::abs(unit.details["orders"][0]["constant"].get<double>() - 1.0);
    for (int k = 1; k <= 2; ++k) {
      worst = std::max(worst, unit.details["orders"][k]["constant"].get<double>());
    }
    check("unit symbol constants (1, 0, 0)", worst, 1e-12);
  });

  guarded("geometry", [&] {
    const BoundaryPoint b(0.7);
    const DiscPoint x = DiscPoint::from_polar(0.8, 2.0);
    check("A(o, b) = 0", std::abs(busemann(DiscPoint(0.0, 0.0), b)), 0.0);
    const MobiusMap rot = MobiusMap::rotation(1.1);
    check("A rotation invariant", std::abs(busemann(rot.apply(x), rot.apply(b)) - busemann(x, b)), 1e-12);
    check("A(tanh(s/2) b, b) = s", std::abs(busemann(DiscPoint::from_polar(1.3, 0.7), b) - 1.3), 1e-12);
    check("cocycle, identity", cocycle_check(MobiusMap::identity(), x, b), 1e-14);
    check("cocycle, rotation", cocycle_check(rot, x, b), 1e-12);
    check("cocycle, translation", cocycle_check(MobiusMap::translation(0.9, 0.3), x, b), 1e-10);
    check("jacobian, identity", std::abs(boundary_jacobian(MobiusMap::identity(), b) - 1.0), 0.0);
    check("jacobian, rotation", std::abs(boundary_jacobian(rot, b) - 1.0), 1e-12);
    const std::vector<double> s0{0.0, 1.0};
    const auto pts = horocycle_points({0.0, b}, s0);
    check("horocycle (0, b) at s = 0 is o", std::abs(pts.front().x.z()), 1e-14);
    const auto arc = arc_grid(5.0, 21);
    const auto level = horocycle_points({0.4, b}, arc);
    double lv = 0.0;
    for (const auto& p : level) {
      lv = std::max(lv, std::abs(busemann(p.x, b) - 0.4));
    }
    check("horocycle level set", lv, 1e-9);
    const PolarGrid pg(3.0, 64, 32);
    check("polar grid area", std::abs(pg.total_weight() / (2.0 * kPi * (std::cosh(3.0) - 1.0)) - 1.0), 1e-3);
    const auto lap = laplace_beltrami_apply(sample_radial(pg, [](double) { return Complex(2.5); }));
    double lmax = 0.0;
    for (std::size_t n = 0; n < lap.value.values.size(); ++n) {
      if (lap.valid[n]) {
        lmax = std::max(lmax, std::abs(lap.value.values[n]));
      }
    }
    check("Laplacian of a constant", lmax, 1e-9);
  });

  guarded("transforms", [&] {
    check("phi_lambda(0) = 1", std::abs(spherical_function(1.7, 0.0) - 1.0), 1e-14);
    check("phi_lambda = phi_-lambda", std::abs(spherical_function(1.7, 1.5) - spherical_function(-1.7, 1.5)), 1e-10);
    const PolarGrid pg(3.2, 64, 32);
    const SpectralGrid sg(16.0, 64, 32);
    const HorocycleGrid hg(8.0, 64, 32);
    const FunctionOnX zero(pg);
    const FourierImage fz = helgason_forward_both(zero, sg);
    check("F 0 = 0", max_abs(fz.positive.values) + max_abs(fz.negative.values), 0.0);
    check("F^-1 0 = 0", max_abs(helgason_inverse(fz.positive, pg, ev).values), 0.0);
    check("R 0 = 0", max_abs(radon_forward(zero, hg).values), 0.0);
    check("R* 0 = 0", max_abs(dual_radon(HorocycleFunction(hg), pg).values), 0.0);
    check("Lambda 0 = 0", max_abs(lambda_op(HorocycleFunction(hg), false, ev).values), 0.0);
    check("T 0 = 0", max_abs(isometry_T(fz, hg, Chamber::both, ev).values), 0.0);
    // Affine in h, so the interpolation in h is exact.
    HorocycleFunction affine(hg);
    for (int i = 0; i < hg.n_points(); ++i) {
      for (int k = 0; k < hg.n_b(); ++k) {
        affine.at(i, k) = 1.0 + hg.h(i);
      }
    }
    const FunctionOnX dual = dual_radon(affine, PolarGrid(1e-3, 2, 32));
    HorocycleFunction psi(hg);
    for (int i = 0; i < hg.n_points(); ++i) {
      for (int k = 0; k < hg.n_b(); ++k) {
        psi.at(i, k) = std::exp(-hg.h(i) * hg.h(i));
      }
    }
    // Innermost ring at r = 5e-4; the deviation from psi(0) = 1 is O(r^2).
    check("R* psi near o = psi(0)", std::abs(dual.at(0, 0) - 1.0), 1e-6);
    const HorocycleFunction same = lambda_op(psi, false, CFunctionEvaluator::unit_symbol());
    double dmax = 0.0;
    for (std::size_t n = 0; n < psi.values.size(); ++n) {
      dmax = std::max(dmax, std::abs(same.values[n] - psi.values[n]));
    }
    check("Lambda with unit symbol is the identity", dmax, 1e-12);
    const FunctionOnX bump = sample_function(pg, [](double r, double th) {
      return Complex(std::exp(-2.0 * r * r) * (1.0 + 0.3 * std::cos(th)));
    });
    const FourierImage fb = helgason_forward_both(bump, sg);
    check("Plancherel (coarse grid)", std::abs(plancherel_norm(fb.positive, ev) / l2_norm(bump) - 1.0), 5e-3);
    check("decay condition, full circle, k = 0",
          std::abs(decay_condition_norm(fb, 0, 0.0, 2.0 * kPi, ev) / l2_norm(bump) - 1.0), 5e-3);
  });

  guarded("evolution", [&] {
    const PolarGrid pg(3.2, 64, 32);
    const SpectralGrid sg(16.0, 64, 32);
    const FunctionOnX bump = sample_function(pg, [](double r, double th) {
      return Complex(std::exp(-2.0 * r * r) * (1.0 + 0.3 * std::sin(th)));
    });
    const FourierImage f = helgason_forward_both(bump, sg);
    const Multiplier a = schrodinger_multiplier();
    const EvolutionState s0 = propagate(a, 0.0, f);
    double id = 0.0;
    for (std::size_t n = 0; n < f.positive.values.size(); ++n) {
      id = std::max(id, std::abs(s0.snapshot.positive.values[n] - f.positive.values[n]));
    }
    check("propagate t = 0 is the identity", id, 0.0);
    const EvolutionState s12 = propagate(a, 0.7, propagate(a, 0.4, f));
    const EvolutionState s3 = propagate(a, 1.1, f);
    double gl = 0.0;
    for (std::size_t n = 0; n < f.positive.values.size(); ++n) {
      gl = std::max(gl, std::abs(s12.snapshot.positive.values[n] - s3.snapshot.positive.values[n]));
    }
    check("group law", relative(gl, max_abs(f.positive.values)), 1e-13);
    check("unitarity", std::abs(state_norm(s3.snapshot, ev) / state_norm(f, ev) - 1.0), 1e-12);
    const HorocycleGrid ig = intertwine_grid(sg);
    check("intertwining at t = 0, p = 1",
          intertwine_homogeneous_check(a, constant_multiplier(1.0), f, 0.0, ig, ev), 1e-12);
    check("intertwining, constant symbol",
          intertwine_homogeneous_check(constant_multiplier(2.5), constant_multiplier(1.0), f, 0.8, ig, ev), 1e-10);
    check("Schroedinger intertwining at t = 0", schrodinger_intertwine_check(f, 0.0, ig, ev), 1e-12);

    const State1D psi = gaussian_1d(1.0, 0.0, 8.0);
    const State1D same = euclid_propagate_1d(free_schrodinger_1d(), 0.0, psi);
    double d1 = 0.0;
    for (std::size_t n = 0; n < psi.values.size(); ++n) {
      d1 = std::max(d1, std::abs(same.values[n] - psi.values[n]));
    }
    check("1D propagation at t = 0", d1, 1e-14);
    const State1D moved = euclid_propagate_1d(free_schrodinger_1d(), 1.0, psi);
    check("1D norm preservation", std::abs(l2_norm(moved) / l2_norm(psi) - 1.0), 1e-12);
    // exp(-x^2) under e^{i t D^2}: exp(-x^2 / (1 - 4 i t)) / sqrt(1 - 4 i t).
    double cf = 0.0;
    for (int i = 0; i < moved.grid.n; ++i) {
      const double x = moved.grid.x(i);
      const Complex den(1.0, -4.0);
      cf = std::max(cf, std::abs(moved.values[static_cast<std::size_t>(i)] - std::exp(-x * x / den) / std::sqrt(den)));
    }
    check("1D free Schroedinger closed form", cf, 1e-6);

    const TimeGrid tg(1.0, 8);
    std::vector<FourierImage> zero_f(static_cast<std::size_t>(tg.n_points()), apply_symbol(f, [](double) { return Complex(0.0); }));
    const FourierImage g = duhamel(a, zero_f, tg.n_intervals(), tg);
    check("Duhamel of zero forcing", max_abs(g.positive.values), 0.0);
  });

  guarded("estimates", [&] {
    const auto [p, q] = corollary_multipliers(constant_multiplier(3.0));
    check("constant a gives p = q = 0", std::abs(p(1.3)) + std::abs(q(1.3)), 0.0);
    const PolarGrid pg(3.2, 64, 32);
    const SpectralGrid sg(16.0, 64, 32);
    SmoothingConfig cfg;
    cfg.n_t = 16;
    cfg.time_horizon = 1.0;
    const auto fam = make_family("gaussian", pg, 1);
    const auto zero_p = smoothing_homogeneous(schrodinger_multiplier(), constant_multiplier(0.0), fam, cfg, sg, ev);
    check("p = 0 gives LHS 0", zero_p.front().lhs_norm, 0.0);
    const ExperimentReport g0 = gain_regularity_1d(gaussian_1d(1.0, 0.0, 4.0), 1, 0.6, TimeGrid(0.0, 0));
    check("gain at t = 0 only", g0.lhs, 0.0);
    const auto r1 = random_mix_family(pg, 2, 42);
    const auto r2 = random_mix_family(pg, 2, 42);
    double same = 0.0;
    for (std::size_t m = 0; m < r1.size(); ++m) {
      for (std::size_t n = 0; n < r1[m].u.values.size(); ++n) {
        same = std::max(same, std::abs(r1[m].u.values[n] - r2[m].u.values[n]));
      }
    }
    check("seeded family reproducible", same, 0.0);
  });

  guarded("config", [&] {
    bool rejected = false;
    try {
      (void)parse_config("[smoothing]\ndelta = 0.4\n");
    } catch (const ConfigError& e) {
      rejected = std::string(e.what()).find("δ must exceed 1/2") != std::string::npos;
    }
    check("delta = 0.4 rejected", rejected ? 0.0 : 1.0, 0.0);
    const RunConfig def;
    check("config round trip", parse_config(def.serialize()).hash() == def.hash() ? 0.0 : 1.0, 0.0);
  });

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string usage() {
  return "usage: hypharm <command> [options]\n"
         "\n"
         "commands:\n"
         "  ctable     tabulate c(lambda), the Plancherel density and symbol constants\n"
         "  transform  forward/inverse, Plancherel, Radon and isometry residuals\n"
         "  propagate  evolve an input under the configured multiplier\n"
         "  smoothing  smoothing experiments with the refinement pass\n"
         "  gain       gain-of-regularity experiments\n"
         "  selftest   fast built-in checks (no config needed)\n"
         "\n"
         "options:\n"
         "  --config PATH   experiment configuration (required except for selftest)\n"
         "  --out DIR       output directory (overrides run.out)\n"
         "  --seed N        seed for random families (overrides run.seed)\n"
         "  --refine        double every grid\n"
         "  --json          write JSON reports\n"
         "  --svg           write SVG plots\n"
         "  --set K=V       override one config key, e.g. --set grid.n_r=128\n"
         "  --jobs N        worker threads (default: hardware concurrency)\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hypharm"};
  app.set_help_flag();
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool refine = false;
  bool json = false;
  bool svg = false;
  bool help = false;
  int jobs = 0;
  std::vector<std::string> overrides;
  double corrupt_c0 = 0.0;
  app.add_option("command", command);
  app.add_option("--config", config_path);
  auto* out_opt = app.add_option("--out", out_dir);
  auto* seed_opt = app.add_option("--seed", seed);
  app.add_flag("--refine", refine);
  app.add_flag("--json", json);
  app.add_flag("--svg", svg);
  app.add_flag("-h,--help", help);
  app.add_option("--jobs", jobs);
  app.add_option("--set", overrides);
  auto* corrupt_opt = app.add_option("--corrupt-c0", corrupt_c0)->group("");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return kExitUsage;
  }
  if (help) {
    out << usage();
    return kExitOk;
  }
  static const std::vector<std::string> commands{"ctable", "transform", "propagate", "smoothing", "gain",
                                                 "selftest"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    err << (command.empty() ? std::string("error: missing command") : "error: unknown command '" + command + "'")
        << "\n\n"
        << usage();
    return kExitUsage;
  }

  if (command == "selftest") {
    SelftestOptions opts;
    if (corrupt_opt->count() > 0) {
      opts.corrupt_c0 = Complex(corrupt_c0, 0.0);
    }
    const SelftestResult res = cmd_selftest(opts);
    nlohmann::json summary = {{"selftest", res.pass ? "PASS" : "FAIL"},
                              {"checks", res.checks.size()},
                              {"seconds", res.seconds},
                              {"failed", nlohmann::json::array()}};
    for (const auto& c : res.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
          << " tol=" << format_number(c.tolerance) << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
      if (!c.pass) {
        summary["failed"].push_back(c.name);
      }
    }
    out << summary.dump() << "\n";
    if (out_opt->count() > 0) {
      io::write_text_file(fs::path(out_dir) / "selftest.json", summary.dump(2) + "\n");
    }
    return res.pass ? kExitOk : kExitFail;
  }

  if (config_path.empty() || !fs::is_regular_file(config_path)) {
    err << (config_path.empty() ? std::string("error: --config is required")
                                : "error: config file '" + config_path + "' not found")
        << "\n\n"
        << usage();
    return kExitUsage;
  }
  RunConfig config;
  try {
    config = load_config(config_path);
    for (const auto& o : overrides) {
      apply_override(config, o);
    }
    if (out_opt->count() > 0) {
      config.run.out = out_dir;
    }
    if (seed_opt->count() > 0) {
      config.run.seed = seed;
    }
    if (refine) {
      config = config.refined();
    }
    config.validate();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }

  OutputOptions options;
  options.out_dir = config.run.out;
  options.json = json;
  options.svg = svg;
  options.jobs = jobs;
  options.timestamp = iso_timestamp();
  try {
    CommandOutput result;
    if (command == "ctable") {
      result = cmd_ctable(config, options);
    } else if (command == "transform") {
      result = cmd_transform(config, options);
    } else if (command == "propagate") {
      result = cmd_propagate(config, options);
    } else if (command == "smoothing") {
      result = cmd_smoothing(config, options);
    } else {
      result = cmd_gain(config, options);
    }
    for (const auto& m : result.messages) {
      out << m << "\n";
    }
    for (const auto& f : result.files) {
      out << "wrote " << f << "\n";
    }
    out << (result.pass ? "PASS" : "FAIL") << " " << command << " (config " << config.hash() << ")\n";
    return result.pass ? kExitOk : kExitFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace hypharm::cli
