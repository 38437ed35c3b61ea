#include "hypharm/estimates.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "hypharm/fft.hpp"
#include "hypharm/geometry.hpp"

namespace hypharm {

void SmoothingConfig::validate() const {
  if (!(delta > 0.5)) {
    throw DomainError("δ must exceed 1/2");
  }
  if (!(chi_inner >= 0.0 && chi_inner < chi_outer)) {
    throw DomainError("smoothing: need 0 <= chi_inner < chi_outer");
  }
  if (!(time_horizon > 0.0)) {
    throw DomainError("smoothing: time horizon must be positive");
  }
  if (n_t < 2 || n_t % 2 != 0) {
    throw DomainError("smoothing: n_t must be an even count >= 2");
  }
  if (family_size < 1) {
    throw DomainError("smoothing: family_size must be positive");
  }
}

double smoothstep7(double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  if (x >= 1.0) {
    return 1.0;
  }
  return x * x * x * x * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

double chi_cutoff(double lambda, double inner, double outer) {
  return smoothstep7((std::abs(lambda) - inner) / (outer - inner));
}

FunctionOnX normalized(const FunctionOnX& u) {
  const double n = l2_norm(u);
  if (n == 0.0) {
    return u;
  }
  return (1.0 / n) * u;
}

const std::vector<std::string>& shipped_family_names() {
  static const std::vector<std::string> names{"gaussian", "modulated", "radial_bump", "off_center"};
  return names;
}

std::vector<FamilyMember> make_family(const std::string& name, const PolarGrid& grid, int size) {
  if (size < 1) {
    throw DomainError("make_family: size must be positive");
  }
  std::vector<FamilyMember> out;
  for (int j = 0; j < size; ++j) {
    FunctionOnX u;
    if (name == "gaussian") {
      const double w = 0.5 * std::pow(2.0, -j / 6.0);
      u = sample_radial(grid, [w](double r) { return Complex(std::exp(-(r / w) * (r / w))); });
    } else if (name == "modulated") {
      const double kappa = std::pow(2.0, j / 2.0);
      u = sample_function(grid, [kappa](double r, double th) {
        return std::exp(-(r / 0.4) * (r / 0.4)) * std::polar(1.0, kappa * log_poisson(r, th));
      });
    } else if (name == "radial_bump") {
      const double big_r = 1.2 + 0.2 * j;
      u = sample_radial(grid, [big_r](double r) {
        const double x = r / big_r;
        return Complex(x < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0);
      });
    } else if (name == "off_center") {
      const DiscPoint center = DiscPoint::from_polar(0.15 * j, 0.0);
      u = sample_function(grid, [center](double r, double th) {
        const double d = hyperbolic_distance(DiscPoint::from_polar(r, th), center) / 0.3;
        return Complex(std::exp(-d * d));
      });
    } else {
      throw DomainError("unknown family '" + name + "'");
    }
    out.push_back({name, j, normalized(u)});
  }
  return out;
}

std::vector<FamilyMember> shipped_families(const PolarGrid& grid, int size) {
  std::vector<FamilyMember> out;
  for (const auto& name : shipped_family_names()) {
    auto fam = make_family(name, grid, size);
    out.insert(out.end(), fam.begin(), fam.end());
  }
  return out;
}

std::vector<FamilyMember> random_mix_family(const PolarGrid& grid, int size, std::uint64_t seed) {
  if (size < 1) {
    throw DomainError("random_mix_family: size must be positive");
  }
  std::mt19937_64 rng(seed);
  // Raw 53-bit draws; the distribution adaptors are not portable bit for bit.
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<FamilyMember> out;
  for (int j = 0; j < size; ++j) {
    struct Bump {
      DiscPoint center;
      double width;
      Complex amplitude;
    };
    std::vector<Bump> bumps;
    for (int m = 0; m < 3; ++m) {
      const double dist = 0.6 * unit();
      const double angle = 2.0 * kPi * unit();
      const double width = 0.25 + 0.25 * unit();
      const double phase = 2.0 * kPi * unit();
      bumps.push_back({DiscPoint::from_polar(dist, angle), width, std::polar(0.5 + unit(), phase)});
    }
    FunctionOnX u = sample_function(grid, [&bumps](double r, double th) {
      const DiscPoint x = DiscPoint::from_polar(r, th);
      Complex v = 0.0;
      for (const auto& b : bumps) {
        const double d = hyperbolic_distance(x, b.center) / b.width;
        v += b.amplitude * std::exp(-d * d);
      }
      return v;
    });
    out.push_back({"random_mix", j, normalized(u)});
  }
  return out;
}

std::vector<InhomogeneousDatum> separable_data(const std::vector<FamilyMember>& family) {
  std::vector<InhomogeneousDatum> out;
  for (const auto& m : family) {
    out.push_back({m.family, m.index, [](double tau) { return Complex(std::exp(-tau * tau)); }, m.u});
  }
  return out;
}

std::vector<FourierImage> family_images(const std::vector<FamilyMember>& family, const SpectralGrid& grid,
                                        Warnings* warnings) {
  std::vector<FunctionOnX> us;
  for (const auto& m : family) {
    us.push_back(m.u);
  }
  return helgason_forward_batch(us, grid, warnings);
}

std::vector<FourierImage> datum_images(const std::vector<InhomogeneousDatum>& data, const SpectralGrid& grid,
                                       Warnings* warnings) {
  std::vector<FunctionOnX> gs;
  for (const auto& d : data) {
    gs.push_back(d.g);
  }
  return helgason_forward_batch(gs, grid, warnings);
}

namespace {

void check_images(std::size_t count, const std::vector<FourierImage>& images, const char* where) {
  if (images.size() != count) {
    throw GridError(std::string(where) + ": " + std::to_string(images.size()) + " images for " +
                    std::to_string(count) + " members");
  }
  for (const auto& im : images) {
    if (!(im.positive.grid == images.front().positive.grid)) {
      throw GridError(std::string(where) + ": images sampled on different spectral grids");
    }
  }
}

}  // namespace

nlohmann::json grid_meta(const PolarGrid& polar, const SpectralGrid& spectral, const TimeGrid& time) {
  return {{"r_max", polar.r_max()},         {"n_r", polar.n_r()},
          {"n_theta", polar.n_theta()},     {"lambda_max", spectral.lambda_max()},
          {"n_lambda", spectral.n_lambda()}, {"n_b", spectral.n_b()},
          {"t_max", time.t_max()},          {"n_t", time.n_intervals()}};
}

namespace {

std::vector<double> bracket_powers(int n_h, double dh, double exponent) {
  std::vector<double> w(static_cast<std::size_t>(n_h));
  for (int p = 0; p < n_h; ++p) {
    w[static_cast<std::size_t>(p)] = std::pow(bracket((p - n_h / 2) * dh), exponent);
  }
  return w;
}

// Squared L^{2}(a x B, w^{-1} dH db) norm with the weight w_h[p] in H.
std::vector<double> grid_weights(const Grid1D& g, double exponent) {
  std::vector<double> w(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    w[static_cast<std::size_t>(i)] = std::pow(bracket(g.x(i)), exponent);
  }
  return w;
}

double weighted_sq_1d(const std::vector<Complex>& v, const std::vector<double>& w, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += w[i] * std::norm(v[i]);
  }
  return s * dx;
}

double integrate_profile(const std::vector<double>& profile, const TimeGrid& time) {
  double s = 0.0;
  for (int i = 0; i < time.n_points(); ++i) {
    s += time.weight(i) * profile[static_cast<std::size_t>(i)];
  }
  return s;
}

void check_time_tail(const std::vector<double>& profile, const std::string& label, Warnings* warnings) {
  if (profile.size() < 2) {
    return;
  }
  const double mx = *std::max_element(profile.begin(), profile.end());
  const double edge = std::max(profile.front(), profile.back());
  if (mx > 0.0 && edge > 0.01 * mx) {
    std::ostringstream msg;
    msg << label << ": integrand at |t| = T is " << 100.0 * edge / mx << "% of its maximum (time tail not negligible)";
    warn(warnings, msg.str());
  }
}

// Per-lambda symbol vectors for both chambers.
struct ChamberSymbols {
  std::vector<Complex> positive;
  std::vector<Complex> negative;
};

ChamberSymbols chamber_symbols(const SpectralGrid& g, const std::function<Complex(double)>& symbol) {
  ChamberSymbols s{std::vector<Complex>(static_cast<std::size_t>(g.n_lambda())),
                   std::vector<Complex>(static_cast<std::size_t>(g.n_lambda()))};
  for (int j = 0; j < g.n_lambda(); ++j) {
    s.positive[static_cast<std::size_t>(j)] = symbol(g.lambda(j));
    s.negative[static_cast<std::size_t>(j)] = symbol(-g.lambda(j));
  }
  return s;
}

// Squared space-time norm on X: profile[i] = ||<H>^{weight_exponent} T(symbol(t_i) u)||^2.
std::vector<double> spacetime_profile_X(const FourierImage& image, const PeriodicTransfer& plan, Chamber chamber,
                                        const TimeGrid& time, double weight_exponent,
                                        const std::function<Complex(int, double)>& symbol) {
  const SpectralGrid& g = plan.grid();
  const int n_h = 2 * g.n_lambda();
  const double dh = 2.0 * kPi / (n_h * g.dlambda());
  const auto w_h = bracket_powers(n_h, dh, 2.0 * weight_exponent);
  const auto columns = plan.columns(image, chamber);
  const double scale = kPi * dh / (measure::kWeylOrder * g.n_b());
  std::vector<double> profile(static_cast<std::size_t>(time.n_points()));
  for (int i = 0; i < time.n_points(); ++i) {
    const auto sym = chamber_symbols(g, [&](double l) { return symbol(i, l); });
    profile[static_cast<std::size_t>(i)] = scale * plan.weighted_sum_sq(columns, sym.positive, sym.negative, w_h);
  }
  return profile;
}

// The b-slices of a periodic horocycle function as zero-padded 1D spectra.
std::vector<SpectralState1D> slice_spectra(const PeriodicHorocycleFunction& f, int padding) {
  std::vector<SpectralState1D> out;
  out.reserve(static_cast<std::size_t>(f.n_b));
  State1D slice{Grid1D{f.h(0), f.dh, f.n_h}, std::vector<Complex>(static_cast<std::size_t>(f.n_h))};
  for (int k = 0; k < f.n_b; ++k) {
    for (int p = 0; p < f.n_h; ++p) {
      slice.values[static_cast<std::size_t>(p)] = f.at(p, k);
    }
    out.emplace_back(zero_pad_centered(slice, padding));
  }
  return out;
}

double slice_weighted_sq(const PeriodicHorocycleFunction& f, int k, double exponent) {
  double s = 0.0;
  for (int p = 0; p < f.n_h; ++p) {
    s += std::pow(bracket(f.h(p)), 2.0 * exponent) * std::norm(f.at(p, k));
  }
  return s * f.dh;
}

// Space-time squared norms of every slice: result[k] = int ||<x>^{e} symbol_t(D) psi_k||^2 dt,
// with the symbol given per time index on the slices' common |xi| list.
std::vector<double> slice_spacetime(const std::vector<SpectralState1D>& slices, const TimeGrid& time,
                                    double weight_exponent,
                                    const std::function<std::vector<Complex>(int, const std::vector<double>&)>& symbol) {
  std::vector<double> out(slices.size(), 0.0);
  if (slices.empty()) {
    return out;
  }
  const Grid1D& g = slices.front().grid();
  const auto w = grid_weights(g, 2.0 * weight_exponent);
  const auto xi = slices.front().abs_frequencies();
  for (int i = 0; i < time.n_points(); ++i) {
    const double wt = time.weight(i);
    if (wt == 0.0) {
      continue;
    }
    const auto sym = symbol(i, xi);
    for (std::size_t k = 0; k < slices.size(); ++k) {
      out[k] += wt * weighted_sq_1d(slices[k].apply_indexed(sym), w, g.dx);
    }
  }
  return out;
}

// Largest ratio sqrt(num_k / den_k) over slices whose denominator is not negligible.
double slice_sup(const std::vector<double>& num, const std::vector<double>& den) {
  double dmax = 0.0;
  for (double d : den) {
    dmax = std::max(dmax, d);
  }
  double best = 0.0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    if (den[k] > 1e-8 * dmax && den[k] > 0.0) {
      best = std::max(best, std::sqrt(num[k] / den[k]));
    }
  }
  return best;
}

std::string member_label(const std::string& family, int index) { return family + "[" + std::to_string(index) + "]"; }

double theta_norm(const std::function<Complex(double)>& theta, const TimeGrid& time) {
  double s = 0.0;
  for (int i = 0; i < time.n_points(); ++i) {
    s += time.weight(i) * std::norm(theta(time.t(i)));
  }
  return std::sqrt(s);
}

std::vector<double> homogeneous_profile(const Multiplier& a, const Multiplier& p, const FourierImage& image,
                                        const PeriodicTransfer& plan, const TimeGrid& time, double delta) {
  return spacetime_profile_X(image, plan, Chamber::both, time, -delta, [&](int i, double l) {
    return p(l) * std::polar(1.0, time.t(i) * a(l));
  });
}

std::vector<double> inhomogeneous_profile(const Multiplier& q, const SeparableDuhamel& duh, const FourierImage& image,
                                          const PeriodicTransfer& plan, const TimeGrid& time,
                                          const SmoothingConfig& cfg) {
  return spacetime_profile_X(image, plan, Chamber::both, time, -cfg.delta, [&](int i, double l) {
    return chi_cutoff(l, cfg.chi_inner, cfg.chi_outer) * q(l) * duh.kernel_at(i, l);
  });
}

}  // namespace

std::vector<EstimateResult> smoothing_homogeneous(const Multiplier& a, const Multiplier& p,
                                                  const std::vector<FamilyMember>& family,
                                                  const SmoothingConfig& cfg, const SpectralGrid& grid,
                                                  const CFunctionEvaluator& ev, Warnings* warnings) {
  Warnings local;
  const auto images = family_images(family, grid, &local);
  auto results = smoothing_homogeneous(a, p, family, images, cfg, ev, warnings);
  for (auto& r : results) {
    r.warnings.insert(r.warnings.begin(), local.begin(), local.end());
  }
  for (const auto& w : local) {
    warn(warnings, w);
  }
  return results;
}

std::vector<EstimateResult> smoothing_homogeneous(const Multiplier& a, const Multiplier& p,
                                                  const std::vector<FamilyMember>& family,
                                                  const std::vector<FourierImage>& images,
                                                  const SmoothingConfig& cfg, const CFunctionEvaluator& ev,
                                                  Warnings* warnings) {
  cfg.validate();
  const TimeGrid time = cfg.time_grid();
  std::vector<EstimateResult> results;
  if (family.empty()) {
    return results;
  }
  check_images(family.size(), images, "smoothing_homogeneous");
  const SpectralGrid& grid = images.front().positive.grid;
  const Warnings local;
  const PeriodicTransfer plan(grid, ev);
  for (std::size_t m = 0; m < family.size(); ++m) {
    EstimateResult r;
    r.family_id = family[m].family;
    r.member = family[m].index;
    r.grid_meta = grid_meta(family[m].u.grid, grid, time);
    r.warnings = local;
    r.time_profile = homogeneous_profile(a, p, images[m], plan, time, cfg.delta);
    r.lhs_norm = std::sqrt(integrate_profile(r.time_profile, time));
    r.rhs_norm = state_norm(images[m], ev);
    r.ratio = safe_ratio(r.lhs_norm, r.rhs_norm);
    check_time_tail(r.time_profile, "smoothing_homogeneous " + member_label(r.family_id, r.member), &r.warnings);
    for (const auto& w : r.warnings) {
      warn(warnings, w);
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<EstimateResult> smoothing_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                    const std::vector<InhomogeneousDatum>& data,
                                                    const SmoothingConfig& cfg, const SpectralGrid& grid,
                                                    const CFunctionEvaluator& ev, Warnings* warnings) {
  Warnings local;
  const auto images = datum_images(data, grid, &local);
  auto results = smoothing_inhomogeneous(a, q, data, images, cfg, ev, warnings);
  for (auto& r : results) {
    r.warnings.insert(r.warnings.begin(), local.begin(), local.end());
  }
  for (const auto& w : local) {
    warn(warnings, w);
  }
  return results;
}

std::vector<EstimateResult> smoothing_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                    const std::vector<InhomogeneousDatum>& data,
                                                    const std::vector<FourierImage>& images,
                                                    const SmoothingConfig& cfg, const CFunctionEvaluator& ev,
                                                    Warnings* warnings) {
  cfg.validate();
  const TimeGrid time = cfg.time_grid();
  std::vector<EstimateResult> results;
  if (data.empty()) {
    return results;
  }
  check_images(data.size(), images, "smoothing_inhomogeneous");
  const SpectralGrid& grid = images.front().positive.grid;
  Warnings local;
  const PeriodicTransfer plan(grid, ev);
  if (time.dt() * std::abs(a(grid.lambda_max())) > kPi / 4.0) {
    warn(&local, "smoothing_inhomogeneous: dt * a(lambda_max) exceeds pi/4 on the output time grid "
                 "(the Duhamel kernel itself is integrated on a finer sub-grid)");
  }
  for (std::size_t m = 0; m < data.size(); ++m) {
    EstimateResult r;
    r.family_id = data[m].family;
    r.member = data[m].index;
    r.grid_meta = grid_meta(data[m].g.grid, grid, time);
    r.warnings = local;
    const SeparableDuhamel duh(a, data[m].theta, grid, time);
    r.time_profile = inhomogeneous_profile(q, duh, images[m], plan, time, cfg);
    r.lhs_norm = std::sqrt(integrate_profile(r.time_profile, time));
    const WeightedNormResult wn = weighted_norm_periodic(plan.apply(images[m], Chamber::both), cfg.delta);
    if (wn.divergent) {
      warn(&r.warnings, "smoothing_inhomogeneous: weighted norm of the forcing is not resolved by the H grid");
    }
    r.rhs_norm = theta_norm(data[m].theta, time) * wn.norm;
    r.ratio = safe_ratio(r.lhs_norm, r.rhs_norm);
    check_time_tail(r.time_profile, "smoothing_inhomogeneous " + member_label(r.family_id, r.member), &r.warnings);
    for (const auto& w : r.warnings) {
      warn(warnings, w);
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::pair<Multiplier, Multiplier> corollary_multipliers(const Multiplier& a) {
  if (!a.has_derivative()) {
    throw DomainError("corollary_multipliers: multiplier '" + a.name + "' has no derivative");
  }
  Multiplier p;
  p.name = "|a'|^1/2 of " + a.name;
  p.value = [a](double l) { return std::sqrt(std::abs(a.prime(l))); };
  p.growth_constant = std::sqrt(2.0 * a.growth_constant * std::max(1.0, a.growth_order));
  p.growth_order = std::max(0.0, 0.5 * (a.growth_order - 1.0));
  Multiplier q;
  q.name = "a' of " + a.name;
  q.value = [a](double l) { return a.prime(l); };
  q.growth_constant = 2.0 * a.growth_constant * std::max(1.0, a.growth_order);
  q.growth_order = std::max(0.0, a.growth_order - 1.0);
  return {p, q};
}

double smoothing_ratio_1d(const Multiplier& a, const Multiplier& p, double delta, const State1D& psi,
                          const TimeGrid& time, int padding, Warnings* warnings) {
  if (!(delta > 0.5)) {
    throw DomainError("δ must exceed 1/2");
  }
  const double norm = l2_norm(psi);
  if (norm == 0.0) {
    return 0.0;
  }
  const SpectralState1D spec(zero_pad_centered(psi, padding));
  if (spec.nyquist_fraction() > 1e-6) {
    warn(warnings, "smoothing_ratio_1d: spectrum at the Nyquist frequency is " +
                       std::to_string(spec.nyquist_fraction()) + " of max (aliasing)");
  }
  const auto w = grid_weights(spec.grid(), -2.0 * delta);
  const auto xi = spec.abs_frequencies();
  std::vector<double> profile(static_cast<std::size_t>(time.n_points()));
  std::vector<Complex> sym(xi.size());
  for (int i = 0; i < time.n_points(); ++i) {
    for (std::size_t q = 0; q < xi.size(); ++q) {
      sym[q] = p(xi[q]) * std::polar(1.0, time.t(i) * a(xi[q]));
    }
    profile[static_cast<std::size_t>(i)] = weighted_sq_1d(spec.apply_indexed(sym), w, spec.grid().dx);
  }
  check_time_tail(profile, "smoothing_ratio_1d", warnings);
  return std::sqrt(integrate_profile(profile, time)) / norm;
}

State1D gaussian_1d(double width, double frequency, double reach) {
  if (!(width > 0.0) || !(reach >= 0.0)) {
    throw DomainError("gaussian_1d: need width > 0 and reach >= 0");
  }
  const double dx = std::min(width / 4.0, kPi / (std::abs(frequency) + 12.0 / width));
  const double half = reach + 6.0 * width;
  const int n = fft::next_pow2(static_cast<int>(std::ceil(2.0 * half / dx)));
  State1D psi{Grid1D::centered(n, dx), std::vector<Complex>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    const double x = psi.grid.x(i);
    psi.values[static_cast<std::size_t>(i)] = std::exp(-(x / width) * (x / width)) * std::polar(1.0, frequency * x);
  }
  return psi;
}

EstimateResult kato_baseline_1d(const Multiplier& a, const Multiplier& p, double delta,
                                const std::vector<State1D>& family, const TimeGrid& time, Warnings* warnings) {
  if (!(delta > 0.5)) {
    throw DomainError("δ must exceed 1/2");
  }
  EstimateResult r;
  r.family_id = "kato_baseline_1d";
  nlohmann::json ratios = nlohmann::json::array();
  for (std::size_t m = 0; m < family.size(); ++m) {
    const double ratio = smoothing_ratio_1d(a, p, delta, family[m], time, 1, &r.warnings);
    ratios.push_back(ratio);
    if (ratio >= r.ratio) {
      r.ratio = ratio;
      r.member = static_cast<int>(m);
      r.rhs_norm = l2_norm(family[m]);
      r.lhs_norm = ratio * r.rhs_norm;
    }
  }
  r.grid_meta = {{"t_max", time.t_max()}, {"n_t", time.n_intervals()}, {"delta", delta}, {"ratios", ratios}};
  for (const auto& w : r.warnings) {
    warn(warnings, w);
  }
  return r;
}

ExperimentReport transfer_comparison(const Multiplier& a, const Multiplier& p,
                                     const std::vector<FamilyMember>& family, const SmoothingConfig& cfg,
                                     const SpectralGrid& grid, const CFunctionEvaluator& ev) {
  Warnings local;
  const auto images = family_images(family, grid, &local);
  ExperimentReport report = transfer_comparison(a, p, family, images, cfg, ev);
  report.warnings.insert(report.warnings.begin(), local.begin(), local.end());
  return report;
}

ExperimentReport transfer_comparison(const Multiplier& a, const Multiplier& p,
                                     const std::vector<FamilyMember>& family,
                                     const std::vector<FourierImage>& images, const SmoothingConfig& cfg,
                                     const CFunctionEvaluator& ev) {
  cfg.validate();
  const TimeGrid time = cfg.time_grid();
  ExperimentReport report;
  report.experiment = "transfer_comparison";
  report.paper_ref = "homogeneous smoothing estimate, transfer to the horocycle variable";
  report.family = family.empty() ? "" : family.front().family;
  report.details["members"] = nlohmann::json::array();
  if (family.empty()) {
    return report;
  }
  check_images(family.size(), images, "transfer_comparison");
  const SpectralGrid& grid = images.front().positive.grid;
  report.grid_meta = grid_meta(family.front().u.grid, grid, time);
  const PeriodicTransfer plan(grid, ev);
  double worst = 0.0;
  for (std::size_t m = 0; m < family.size(); ++m) {
    const auto profile = homogeneous_profile(a, p, images[m], plan, time, cfg.delta);
    const double lhs_x = std::sqrt(integrate_profile(profile, time));
    const double norm = state_norm(images[m], ev);
    double c1d = 0.0;
    for (Chamber s : {Chamber::positive, Chamber::negative}) {
      const auto f = plan.apply(images[m], s);
      const auto slices = slice_spectra(f, 2);
      std::vector<double> den(slices.size());
      for (int k = 0; k < f.n_b; ++k) {
        den[static_cast<std::size_t>(k)] = slice_weighted_sq(f, k, 0.0);
      }
      const auto num = slice_spacetime(slices, time, -cfg.delta, [&](int i, const std::vector<double>& xi) {
        std::vector<Complex> sym(xi.size());
        for (std::size_t q = 0; q < xi.size(); ++q) {
          sym[q] = p(xi[q]) * std::polar(1.0, time.t(i) * a(xi[q]));
        }
        return sym;
      });
      c1d = std::max(c1d, slice_sup(num, den));
    }
    const double bound = std::sqrt(measure::kWeylOrder) * c1d * norm;
    const bool ok = lhs_x <= 1.05 * bound;
    report.pass = report.pass && ok;
    const double used = bound > 0.0 ? lhs_x / bound : 0.0;
    worst = std::max(worst, used);
    report.details["members"].push_back({{"member", member_label(family[m].family, family[m].index)},
                                         {"lhs_x", lhs_x},
                                         {"norm", norm},
                                         {"c_1d", c1d},
                                         {"bound", bound},
                                         {"lhs_over_bound", used},
                                         {"pass", ok}});
    if (m == 0 || used >= worst) {
      report.lhs = lhs_x;
      report.rhs = bound;
    }
  }
  report.ratio = worst;
  return report;
}

ExperimentReport transfer_comparison_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                   const std::vector<InhomogeneousDatum>& data,
                                                   const SmoothingConfig& cfg, const SpectralGrid& grid,
                                                   const CFunctionEvaluator& ev) {
  Warnings local;
  const auto images = datum_images(data, grid, &local);
  ExperimentReport report = transfer_comparison_inhomogeneous(a, q, data, images, cfg, ev);
  report.warnings.insert(report.warnings.begin(), local.begin(), local.end());
  return report;
}

ExperimentReport transfer_comparison_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                   const std::vector<InhomogeneousDatum>& data,
                                                   const std::vector<FourierImage>& images,
                                                   const SmoothingConfig& cfg, const CFunctionEvaluator& ev) {
  cfg.validate();
  const TimeGrid time = cfg.time_grid();
  ExperimentReport report;
  report.experiment = "transfer_comparison_inhomogeneous";
  report.paper_ref = "inhomogeneous smoothing estimate, transfer to the horocycle variable";
  report.family = data.empty() ? "" : data.front().family;
  report.details["members"] = nlohmann::json::array();
  if (data.empty()) {
    return report;
  }
  check_images(data.size(), images, "transfer_comparison_inhomogeneous");
  const SpectralGrid& grid = images.front().positive.grid;
  report.grid_meta = grid_meta(data.front().g.grid, grid, time);
  const PeriodicTransfer plan(grid, ev);
  double worst = 0.0;
  for (std::size_t m = 0; m < data.size(); ++m) {
    const SeparableDuhamel duh(a, data[m].theta, grid, time);
    const auto profile = inhomogeneous_profile(q, duh, images[m], plan, time, cfg);
    const double lhs_x = std::sqrt(integrate_profile(profile, time));
    const double th = theta_norm(data[m].theta, time);
    double split_sq = 0.0;
    double c1d = 0.0;
    for (Chamber s : {Chamber::positive, Chamber::negative}) {
      const auto f = plan.apply(images[m], s);
      split_sq += std::pow(weighted_norm_periodic(f, cfg.delta).norm, 2);
      const auto slices = slice_spectra(f, 2);
      std::vector<double> den(slices.size());
      for (int k = 0; k < f.n_b; ++k) {
        den[static_cast<std::size_t>(k)] = th * th * slice_weighted_sq(f, k, cfg.delta);
      }
      const SeparableDuhamel duh1d(a, data[m].theta, slices.front().abs_frequencies(), time);
      const auto num = slice_spacetime(slices, time, -cfg.delta, [&](int i, const std::vector<double>& xi) {
        std::vector<Complex> sym(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j) {
          sym[j] = chi_cutoff(xi[j], cfg.chi_inner, cfg.chi_outer) * q(xi[j]) * duh1d.kernel(i, static_cast<int>(j));
        }
        return sym;
      });
      c1d = std::max(c1d, slice_sup(num, den));
    }
    const double rhs_split = th * std::sqrt(split_sq);
    const double bound = std::sqrt(measure::kWeylOrder) * c1d * rhs_split;
    const bool ok = lhs_x <= 1.05 * bound || lhs_x == 0.0;
    report.pass = report.pass && ok;
    const double used = bound > 0.0 ? lhs_x / bound : 0.0;
    worst = std::max(worst, used);
    report.details["members"].push_back({{"member", member_label(data[m].family, data[m].index)},
                                         {"lhs_x", lhs_x},
                                         {"rhs_split", rhs_split},
                                         {"c_1d", c1d},
                                         {"bound", bound},
                                         {"lhs_over_bound", used},
                                         {"pass", ok}});
    if (m == 0 || used >= worst) {
      report.lhs = lhs_x;
      report.rhs = bound;
    }
  }
  report.ratio = worst;
  return report;
}

ExperimentReport gain_regularity_1d(const State1D& phi, int k, double delta, const TimeGrid& time, int padding,
                                    Warnings* warnings) {
  if (!(delta > 0.5)) {
    throw DomainError("δ must exceed 1/2");
  }
  if (k < 0) {
    throw DomainError("gain_regularity_1d: k must be nonnegative");
  }
  ExperimentReport report;
  report.experiment = "gain_regularity_1d";
  report.paper_ref = "gain of regularity on the line";
  report.family = "state";
  report.grid_meta = {{"n", phi.grid.n},   {"dx", phi.grid.dx},   {"padding", padding}, {"t_max", time.t_max()},
                      {"n_t", time.n_intervals()}, {"k", k}, {"delta", delta}};
  const SpectralState1D spec(zero_pad_centered(phi, padding));
  if (spec.nyquist_fraction() > 1e-6) {
    warn(&report.warnings, "gain_regularity_1d: spectrum at the Nyquist frequency is " +
                               std::to_string(spec.nyquist_fraction()) + " of max (aliasing)");
  }
  const Grid1D& g = spec.grid();
  report.rhs = std::sqrt(weighted_sq_1d(zero_pad_centered(phi, padding).values, grid_weights(g, 2.0 * k), g.dx));
  const auto w_gain = grid_weights(g, -2.0 * (k + delta));
  const auto w_cont = grid_weights(g, -2.0 * k);
  const auto xi = spec.abs_frequencies();
  std::vector<double> profile(static_cast<std::size_t>(time.n_points()));
  double cont = 0.0;
  std::vector<Complex> s1(xi.size());
  std::vector<Complex> s2(xi.size());
  for (int i = 0; i < time.n_points(); ++i) {
    const double t = time.t(i);
    const double tk = std::pow(t, k);
    for (std::size_t q = 0; q < xi.size(); ++q) {
      const Complex phase = std::polar(1.0, t * xi[q] * xi[q]);
      s1[q] = tk * std::pow(bracket(xi[q]), k + 0.5) * phase;
      s2[q] = tk * std::pow(bracket(xi[q]), k) * phase;
    }
    profile[static_cast<std::size_t>(i)] = weighted_sq_1d(spec.apply_indexed(s1), w_gain, g.dx);
    cont = std::max(cont, weighted_sq_1d(spec.apply_indexed(s2), w_cont, g.dx));
  }
  report.lhs = std::sqrt(integrate_profile(profile, time));
  report.ratio = safe_ratio(report.lhs, report.rhs);
  report.details["continuous_ratio"] = safe_ratio(std::sqrt(cont), report.rhs);
  report.details["time_profile"] = profile;
  for (const auto& w : report.warnings) {
    warn(warnings, w);
  }
  return report;
}

ExperimentReport gain_regularity_X(const FunctionOnX& phi, int k, double delta, const TimeGrid& time,
                                   const SpectralGrid& grid, const CFunctionEvaluator& ev, Warnings* warnings) {
  if (!(delta > 0.5)) {
    throw DomainError("δ must exceed 1/2");
  }
  if (k < 0) {
    throw DomainError("gain_regularity_X: k must be nonnegative");
  }
  ExperimentReport report;
  report.experiment = "gain_regularity_X";
  report.paper_ref = "gain of regularity for the Schroedinger flow on X";
  report.family = "input";
  report.grid_meta = grid_meta(phi.grid, grid, time);
  report.grid_meta["k"] = k;
  report.grid_meta["delta"] = delta;
  const FourierImage image = helgason_forward_both(phi, grid, &report.warnings);
  const PeriodicTransfer plan(grid, ev);
  const PeriodicHorocycleFunction tphi = plan.apply(image, Chamber::both);
  const WeightedNormResult wn = weighted_norm_periodic(tphi, k);
  if (wn.divergent) {
    warn(&report.warnings, "gain_regularity_X: L^{2,k} norm of the datum is not resolved by the H grid");
  }
  report.rhs = wn.norm;
  const double rho2 = std::pow(ev.root_data().rho(), 2);
  auto phase = [&](int i, double l) { return std::polar(1.0, time.t(i) * (l * l + rho2)); };
  const auto profile = spacetime_profile_X(image, plan, Chamber::both, time, -(k + delta), [&](int i, double l) {
    return std::pow(time.t(i), k) * std::pow(bracket(l), k + 0.5) * phase(i, l);
  });
  const auto cont = spacetime_profile_X(image, plan, Chamber::both, time, -k, [&](int i, double l) {
    return std::pow(time.t(i), k) * std::pow(bracket(l), k) * phase(i, l);
  });
  report.lhs = std::sqrt(integrate_profile(profile, time));
  report.ratio = safe_ratio(report.lhs, report.rhs);
  report.details["continuous_ratio"] =
      safe_ratio(std::sqrt(*std::max_element(cont.begin(), cont.end())), report.rhs);
  report.details["time_profile"] = profile;

  // Transferred data: the slices of T phi under the 1D free Schroedinger flow.
  const auto slices = slice_spectra(tphi, 2);
  double den = 0.0;
  for (int b = 0; b < tphi.n_b; ++b) {
    den += slice_weighted_sq(tphi, b, k);
  }
  const auto num = slice_spacetime(slices, time, -(k + delta), [&](int i, const std::vector<double>& xi) {
    std::vector<Complex> sym(xi.size());
    const double t = time.t(i);
    for (std::size_t q = 0; q < xi.size(); ++q) {
      sym[q] = std::pow(t, k) * std::pow(bracket(xi[q]), k + 0.5) * std::polar(1.0, t * xi[q] * xi[q]);
    }
    return sym;
  });
  double num_total = 0.0;
  for (double v : num) {
    num_total += v;
  }
  const double ratio_1d = den > 0.0 ? std::sqrt(num_total / den) : 0.0;
  report.details["ratio_1d"] = ratio_1d;
  const double rel = ratio_1d > 0.0 ? std::abs(report.ratio / ratio_1d - 1.0) : std::abs(report.ratio);
  report.details["relative_difference"] = rel;
  report.pass = std::isfinite(report.ratio) && rel <= 0.01;
  for (const auto& w : report.warnings) {
    warn(warnings, w);
  }
  return report;
}

double decay_condition_norm(const FourierImage& image, int k, double arc_start, double arc_end,
                            const CFunctionEvaluator& ev) {
  if (!(arc_end > arc_start)) {
    throw DomainError("decay_condition_norm: empty arc");
  }
  const PeriodicHorocycleFunction f = isometry_T_periodic(image, Chamber::both, ev);
  const double length = arc_end - arc_start;
  const SpectralGrid& g = image.positive.grid;
  double s = 0.0;
  for (int b = 0; b < f.n_b; ++b) {
    double d = std::fmod(g.b(b) - arc_start, 2.0 * kPi);
    if (d < 0.0) {
      d += 2.0 * kPi;
    }
    const bool inside = length >= 2.0 * kPi || d <= length + 1e-12 || d >= 2.0 * kPi - 1e-12;
    if (!inside) {
      continue;
    }
    s += slice_weighted_sq(f, b, k);
  }
  return std::sqrt(s * kPi / (measure::kWeylOrder * f.n_b));
}

double decay_condition_norm(const FunctionOnX& phi, int k, double arc_start, double arc_end,
                            const SpectralGrid& grid, const CFunctionEvaluator& ev) {
  return decay_condition_norm(helgason_forward_both(phi, grid), k, arc_start, arc_end, ev);
}

StabilityInfo refinement_stability(double base_ratio, double refined_ratio) {
  StabilityInfo info;
  info.refined_ratio = refined_ratio;
  info.delta_pct = base_ratio != 0.0 ? 100.0 * (refined_ratio - base_ratio) / base_ratio
                                     : (refined_ratio == 0.0 ? 0.0 : INFINITY);
  return info;
}

bool is_stable(const StabilityInfo& info, double tolerance_pct) {
  return std::isfinite(info.delta_pct) && std::abs(info.delta_pct) <= tolerance_pct;
}

}  // namespace hypharm
