#include "hypharm/evolution.hpp"

#include <cmath>
#include <sstream>

#include "hypharm/fft.hpp"

namespace hypharm {

double Multiplier::prime(double lambda) const {
  if (!derivative) {
    throw DomainError("multiplier '" + name + "' has no derivative");
  }
  return derivative(lambda);
}

Multiplier schrodinger_multiplier(double rho) {
  Multiplier a;
  a.name = "schrodinger";
  a.value = [rho](double l) { return l * l + rho * rho; };
  a.derivative = [](double l) { return 2.0 * l; };
  a.growth_constant = 1.0 + rho * rho;
  a.growth_order = 2.0;
  return a;
}

Multiplier polynomial_multiplier(std::vector<double> coefficients, double rho) {
  if (coefficients.empty()) {
    throw DomainError("polynomial multiplier needs at least one coefficient");
  }
  Multiplier a;
  std::ostringstream name;
  name << "poly:";
  double total = 0.0;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    name << (k ? "," : "") << coefficients[k];
    total += std::abs(coefficients[k]) * std::pow(1.0 + rho * rho, static_cast<double>(k));
  }
  a.name = name.str();
  a.value = [coefficients, rho](double l) {
    const double x = l * l + rho * rho;
    double v = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
      v = v * x + *it;
    }
    return v;
  };
  a.derivative = [coefficients, rho](double l) {
    const double x = l * l + rho * rho;
    double v = 0.0;
    for (std::size_t k = coefficients.size() - 1; k >= 1; --k) {
      v = v * x + static_cast<double>(k) * coefficients[k];
    }
    return v * 2.0 * l;
  };
  a.growth_constant = std::max(total, 1e-300);
  a.growth_order = 2.0 * static_cast<double>(coefficients.size() - 1);
  return a;
}

Multiplier homogeneous_multiplier(double m) {
  if (!(m >= 0.0)) {
    throw DomainError("homogeneous multiplier needs m >= 0");
  }
  Multiplier a;
  std::ostringstream name;
  name << "homogeneous:" << m;
  a.name = name.str();
  a.value = [m](double l) { return std::pow(l, m); };
  a.derivative = [m](double l) { return m == 0.0 ? 0.0 : m * std::pow(l, m - 1.0); };
  a.growth_constant = 1.0;
  a.growth_order = m;
  return a;
}

Multiplier constant_multiplier(double c) {
  Multiplier a;
  std::ostringstream name;
  name << "const:" << c;
  a.name = name.str();
  a.value = [c](double) { return c; };
  a.derivative = [](double) { return 0.0; };
  a.growth_constant = std::max(std::abs(c), 1e-300);
  a.growth_order = 0.0;
  return a;
}

Multiplier free_schrodinger_1d() {
  Multiplier a = homogeneous_multiplier(2.0);
  a.name = "free_schrodinger_1d";
  return a;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("multiplier '" + spec + "': '" + item + "' is not a number");
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw DomainError("multiplier '" + spec + "': '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw DomainError("multiplier '" + spec + "': missing parameters");
  }
  return out;
}

}  // namespace

Multiplier parse_multiplier(const std::string& spec) {
  if (spec == "schrodinger") {
    return schrodinger_multiplier();
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw DomainError("unknown multiplier '" + spec + "' (expected schrodinger, poly:..., homogeneous:m, const:c)");
  }
  const std::string kind = spec.substr(0, colon);
  const auto values = parse_numbers(spec.substr(colon + 1), spec);
  if (kind == "poly") {
    return polynomial_multiplier(values);
  }
  if (kind == "homogeneous" && values.size() == 1) {
    return homogeneous_multiplier(values[0]);
  }
  if (kind == "const" && values.size() == 1) {
    return constant_multiplier(values[0]);
  }
  throw DomainError("unknown multiplier '" + spec + "'");
}

bool multiplier_growth_ok(const Multiplier& a, const std::vector<double>& lambdas) {
  for (double l : lambdas) {
    const double v = a(l);
    if (!std::isfinite(v)) {
      return false;
    }
    if (std::abs(v) > a.growth_constant * std::pow(bracket(l), a.growth_order) * (1.0 + 1e-12)) {
      return false;
    }
  }
  return true;
}

TimeGrid::TimeGrid(double t_max, int n_intervals) : t_max_(t_max), n_(n_intervals) {
  if (n_intervals == 0 && t_max == 0.0) {
    return;
  }
  if (!(t_max > 0.0) || n_intervals < 2 || n_intervals % 2 != 0) {
    throw GridError("TimeGrid: need T > 0 and an even interval count >= 2 (or T = 0 with 0 intervals)");
  }
}

double TimeGrid::weight(int i) const {
  if (n_ == 0) {
    return 0.0;
  }
  const double c = (i == 0 || i == n_) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
  return c * dt() / 3.0;
}

FourierImage apply_symbol(const FourierImage& image, const std::function<Complex(double)>& symbol) {
  FourierImage out = image;
  const SpectralGrid& g = image.positive.grid;
  for (int j = 0; j < g.n_lambda(); ++j) {
    const Complex sp = symbol(g.lambda(j));
    const Complex sn = symbol(-g.lambda(j));
    for (int k = 0; k < g.n_b(); ++k) {
      out.positive.at(j, k) *= sp;
      out.negative.at(j, k) *= sn;
    }
  }
  return out;
}

EvolutionState propagate(const Multiplier& a, double t, const FourierImage& u0) {
  if (t == 0.0) {
    return {0.0, u0};
  }
  return {t, apply_symbol(u0, [&](double l) { return std::polar(1.0, t * a(l)); })};
}

EvolutionState propagate(const Multiplier& a, double t, const EvolutionState& state) {
  EvolutionState next = propagate(a, t, state.snapshot);
  next.time = state.time + t;
  return next;
}

EvolutionState propagate(const Multiplier& a, double t, const FunctionOnX& u0, const SpectralGrid& grid,
                         Warnings* warnings) {
  return propagate(a, t, helgason_forward_both(u0, grid, warnings));
}

FunctionOnX materialize(const EvolutionState& state, const PolarGrid& grid, const CFunctionEvaluator& ev,
                        Warnings* warnings) {
  return helgason_inverse(state.snapshot.positive, grid, ev, warnings);
}

double state_norm(const FourierImage& image, const CFunctionEvaluator& ev) {
  return plancherel_norm(image.positive, ev);
}

FunctionOnX multiplier_apply(const Multiplier& a, const FunctionOnX& u, const SpectralGrid& grid,
                             const CFunctionEvaluator& ev, Warnings* warnings) {
  SpectralTable table = helgason_forward(u, grid, +1, warnings);
  double mx = 0.0;
  double last = 0.0;
  for (int j = 0; j < grid.n_lambda(); ++j) {
    const double v = a(grid.lambda(j));
    for (int k = 0; k < grid.n_b(); ++k) {
      table.at(j, k) *= v;
      mx = std::max(mx, std::abs(table.at(j, k)));
      if (j == grid.n_lambda() - 1) {
        last = std::max(last, std::abs(table.at(j, k)));
      }
    }
  }
  if (mx > 0.0 && last > 1e-6 * mx) {
    warn(warnings, "multiplier_apply: a(lambda) F u at lambda_max is " + std::to_string(last / mx) + " of max");
  }
  return helgason_inverse(table, u.grid, ev, warnings);
}

namespace {

// Cumulative integral of samples y_0..y_d (spacing h) by composite Simpson,
// with a 3/8 panel at the end when d is odd.
template <typename Get>
Complex cumulative_simpson(int d, double h, const Get& y) {
  if (d == 0) {
    return 0.0;
  }
  if (d == 1) {
    return 0.5 * h * (y(0) + y(1));
  }
  Complex s = 0.0;
  const int even_end = (d % 2 == 0) ? d : d - 3;
  for (int q = 0; q + 2 <= even_end; q += 2) {
    s += h / 3.0 * (y(q) + 4.0 * y(q + 1) + y(q + 2));
  }
  if (d % 2 == 1) {
    const int q = d - 3;
    s += 3.0 * h / 8.0 * (y(q) + 3.0 * y(q + 1) + 3.0 * y(q + 2) + y(q + 3));
  }
  return s;
}

}  // namespace

FourierImage duhamel(const Multiplier& a, const std::vector<FourierImage>& f, int t_index, const TimeGrid& time,
                     Warnings* warnings) {
  if (static_cast<int>(f.size()) != time.n_points()) {
    throw GridError("duhamel: f must be sampled at every node of the time grid");
  }
  if (t_index < 0 || t_index >= time.n_points()) {
    throw DomainError("duhamel: t_index outside the time grid");
  }
  const SpectralGrid& g = f.front().positive.grid;
  const double dt = time.dt();
  if (dt * std::abs(a(g.lambda_max())) > kPi / 4.0) {
    warn(warnings, "duhamel: dt * a(lambda_max) = " + std::to_string(dt * std::abs(a(g.lambda_max()))) +
                       " exceeds pi/4");
  }
  const int i0 = time.zero_index();
  const int d = std::abs(t_index - i0);
  const int dir = t_index >= i0 ? 1 : -1;
  const double t = time.t(t_index);
  FourierImage out{SpectralTable(g, +1), SpectralTable(g, -1)};
  for (int j = 0; j < g.n_lambda(); ++j) {
    const double av = a(g.lambda(j));
    for (int k = 0; k < g.n_b(); ++k) {
      auto integrate = [&](auto member) {
        auto y = [&](int q) {
          const int idx = i0 + dir * q;
          const double tau = time.t(idx);
          return std::polar(1.0, (t - tau) * av) * (f[static_cast<std::size_t>(idx)].*member).at(j, k);
        };
        return static_cast<double>(dir) * cumulative_simpson(d, dt, y);
      };
      out.positive.at(j, k) = integrate(&FourierImage::positive);
      out.negative.at(j, k) = integrate(&FourierImage::negative);
    }
  }
  return out;
}

FunctionOnX duhamel(const Multiplier& a, const std::vector<FunctionOnX>& f, int t_index, const TimeGrid& time,
                    const SpectralGrid& grid, const CFunctionEvaluator& ev, Warnings* warnings) {
  const auto images = helgason_forward_batch(f, grid, warnings);
  const FourierImage g = duhamel(a, images, t_index, time, warnings);
  return helgason_inverse(g.positive, f.front().grid, ev, warnings);
}

SeparableDuhamel::SeparableDuhamel(const Multiplier& a, const std::function<Complex(double)>& theta,
                                   const SpectralGrid& grid, const TimeGrid& time)
    : midpoint_dlambda_(grid.dlambda()) {
  build(a, theta, grid.lambda_values(), time);
}

SeparableDuhamel::SeparableDuhamel(const Multiplier& a, const std::function<Complex(double)>& theta,
                                   const std::vector<double>& lambdas, const TimeGrid& time) {
  build(a, theta, lambdas, time);
}

void SeparableDuhamel::build(const Multiplier& a, const std::function<Complex(double)>& theta,
                             const std::vector<double>& lambdas, const TimeGrid& time) {
  n_lambda_ = static_cast<int>(lambdas.size());
  const int nt = time.n_points();
  kernel_.assign(static_cast<std::size_t>(nt) * n_lambda_, Complex{});
  if (time.n_intervals() == 0) {
    return;
  }
  const int i0 = time.zero_index();
  const double dt = time.dt();
  for (int j = 0; j < n_lambda_; ++j) {
    const double av = a(lambdas[static_cast<std::size_t>(j)]);
    // Sub-steps per grid interval: even, and fine enough for both the phase and theta.
    int sub = static_cast<int>(std::ceil(std::abs(av) * dt / (kPi / 8.0)));
    sub = std::max(sub, 8);
    sub += sub % 2;
    const double h = dt / sub;
    for (int dir : {1, -1}) {
      // J(t) = int_0^t e^{-i tau a} theta(tau) dtau, accumulated panel by panel.
      Complex acc = 0.0;
      const int steps = dir > 0 ? nt - 1 - i0 : i0;
      for (int q = 1; q <= steps; ++q) {
        const double start = dir * (q - 1) * dt;
        Complex panel = 0.0;
        for (int s = 0; s <= sub; ++s) {
          const double tau = start + dir * s * h;
          const double c = (s == 0 || s == sub) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
          panel += c * std::polar(1.0, -tau * av) * theta(tau);
        }
        acc += static_cast<double>(dir) * h / 3.0 * panel;
        const int idx = i0 + dir * q;
        const double t = time.t(idx);
        kernel_[static_cast<std::size_t>(idx) * n_lambda_ + j] = std::polar(1.0, t * av) * acc;
      }
    }
  }
}

Complex SeparableDuhamel::kernel_at(int t_index, double signed_lambda) const {
  if (midpoint_dlambda_ == 0.0) {
    throw DomainError("SeparableDuhamel::kernel_at needs the midpoint-grid constructor");
  }
  const int j = static_cast<int>(std::lround(std::abs(signed_lambda) / midpoint_dlambda_ - 0.5));
  if (j < 0 || j >= n_lambda_) {
    return 0.0;
  }
  return kernel(t_index, j);
}

FourierImage SeparableDuhamel::state(int t_index, const FourierImage& g) const {
  return apply_symbol(g, [&](double l) { return kernel_at(t_index, l); });
}

State1D fourier_multiplier_1d(const std::function<Complex(double)>& symbol, const State1D& psi, int padding,
                              Warnings* warnings) {
  const int n = psi.grid.n;
  if (n < 2 || padding < 1 || static_cast<int>(psi.values.size()) != n) {
    throw GridError("fourier_multiplier_1d: need n >= 2 samples and padding >= 1");
  }
  const int big = fft::next_pow2(padding * n);
  std::vector<Complex> buf(static_cast<std::size_t>(big));
  std::copy(psi.values.begin(), psi.values.end(), buf.begin());
  fft::forward(buf);
  double mx = 0.0;
  for (const auto& v : buf) {
    mx = std::max(mx, std::abs(v));
  }
  if (mx > 0.0 && std::abs(buf[static_cast<std::size_t>(big / 2)]) > 1e-6 * mx) {
    warn(warnings, "fourier_multiplier_1d: spectrum at the Nyquist frequency is " +
                       std::to_string(std::abs(buf[static_cast<std::size_t>(big / 2)]) / mx) + " of max (aliasing)");
  }
  const double dx = psi.grid.dx;
  // Samples sit at x_min + i dx; the multiplier is translation invariant, so the
  // offset only matters through the frequency grid.
  for (int q = 0; q < big; ++q) {
    buf[static_cast<std::size_t>(q)] *= symbol(2.0 * kPi * fft::signed_bin(q, big) / (big * dx));
  }
  fft::backward(buf);
  State1D out{psi.grid, std::vector<Complex>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    out.values[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(i)] / static_cast<double>(big);
  }
  return out;
}

State1D euclid_propagate_1d(const Multiplier& a, double t, const State1D& psi, int padding, Warnings* warnings) {
  if (t == 0.0) {
    return psi;
  }
  return fourier_multiplier_1d([&](double xi) { return std::polar(1.0, t * a(xi)); }, psi, padding, warnings);
}

double l2_norm(const State1D& psi) {
  double s = 0.0;
  for (const auto& v : psi.values) {
    s += std::norm(v);
  }
  return std::sqrt(s * psi.grid.dx);
}

State1D zero_pad_centered(const State1D& psi, int factor) {
  const int n = psi.grid.n;
  const int big = fft::next_pow2(std::max(1, factor) * n);
  const int offset = (big - n) / 2;
  State1D out{Grid1D{psi.grid.x_min - offset * psi.grid.dx, psi.grid.dx, big},
              std::vector<Complex>(static_cast<std::size_t>(big))};
  std::copy(psi.values.begin(), psi.values.end(), out.values.begin() + offset);
  return out;
}

SpectralState1D::SpectralState1D(const State1D& psi) : grid_(psi.grid), spectrum_(psi.values) {
  if (grid_.n < 2 || static_cast<int>(spectrum_.size()) != grid_.n) {
    throw GridError("SpectralState1D: need n >= 2 samples");
  }
  fft::forward(spectrum_);
}

double SpectralState1D::frequency(int q) const {
  return 2.0 * kPi * fft::signed_bin(q, grid_.n) / (grid_.n * grid_.dx);
}

std::vector<double> SpectralState1D::abs_frequencies() const {
  std::vector<double> out(static_cast<std::size_t>(grid_.n / 2 + 1));
  for (std::size_t q = 0; q < out.size(); ++q) {
    out[q] = 2.0 * kPi * static_cast<double>(q) / (grid_.n * grid_.dx);
  }
  return out;
}

int SpectralState1D::abs_index(int q) const { return std::abs(fft::signed_bin(q, grid_.n)); }

double SpectralState1D::nyquist_fraction() const {
  double mx = 0.0;
  for (const auto& v : spectrum_) {
    mx = std::max(mx, std::abs(v));
  }
  return mx > 0.0 ? std::abs(spectrum_[static_cast<std::size_t>(grid_.n / 2)]) / mx : 0.0;
}

std::vector<Complex> SpectralState1D::apply(const std::function<Complex(double)>& symbol) const {
  std::vector<Complex> buf(spectrum_.size());
  for (int q = 0; q < grid_.n; ++q) {
    buf[static_cast<std::size_t>(q)] = spectrum_[static_cast<std::size_t>(q)] * symbol(frequency(q));
  }
  fft::backward(buf);
  for (auto& v : buf) {
    v /= static_cast<double>(grid_.n);
  }
  return buf;
}

std::vector<Complex> SpectralState1D::apply_indexed(const std::vector<Complex>& symbol_by_abs_index) const {
  std::vector<Complex> buf(spectrum_.size());
  for (int q = 0; q < grid_.n; ++q) {
    buf[static_cast<std::size_t>(q)] =
        spectrum_[static_cast<std::size_t>(q)] * symbol_by_abs_index[static_cast<std::size_t>(abs_index(q))];
  }
  fft::backward(buf);
  for (auto& v : buf) {
    v /= static_cast<double>(grid_.n);
  }
  return buf;
}

namespace {

// Applies a 1D symbol to every b-column of f (horocycle grid, dH measure).
HorocycleFunction columns_1d(const HorocycleFunction& f, const std::function<Complex(double)>& symbol_in_h,
                             int padding, Warnings* warnings) {
  const HorocycleGrid& g = f.grid;
  // The multiplier acts in the Lebesgue variable H, so frequencies are those of H itself.
  HorocycleFunction out(g);
  State1D col{Grid1D{-g.h_max(), g.dh(), g.n_points()}, std::vector<Complex>(static_cast<std::size_t>(g.n_points()))};
  for (int k = 0; k < g.n_b(); ++k) {
    for (int p = 0; p < g.n_points(); ++p) {
      col.values[static_cast<std::size_t>(p)] = f.at(p, k);
    }
    const State1D res = fourier_multiplier_1d(symbol_in_h, col, padding, k == 0 ? warnings : nullptr);
    for (int p = 0; p < g.n_points(); ++p) {
      out.at(p, k) = res.values[static_cast<std::size_t>(p)];
    }
  }
  return out;
}

void check_window(const HorocycleGrid& grid, const SpectralGrid& spectral) {
  if (2.0 * grid.h_max() >= 2.0 * kPi / spectral.dlambda()) {
    throw GridError("intertwining check: horocycle window exceeds the period of the lambda sum");
  }
}

double horocycle_distance(const HorocycleFunction& a, const HorocycleFunction& b) {
  HorocycleFunction d = a;
  for (std::size_t q = 0; q < d.values.size(); ++q) {
    d.values[q] -= b.values[q];
  }
  return horocycle_isometry_norm(d);
}

}  // namespace

HorocycleGrid intertwine_grid(const SpectralGrid& grid) {
  const double h_max = 0.9 * kPi / grid.dlambda();
  int n_h = static_cast<int>(std::ceil(2.0 * h_max * 1.05 * grid.lambda_max() / kPi));
  n_h += n_h % 2;
  return HorocycleGrid(h_max, n_h, grid.n_b());
}

double intertwine_homogeneous_check(const Multiplier& a, const Multiplier& p, const FourierImage& u0, double t,
                                    const HorocycleGrid& grid, const CFunctionEvaluator& ev, Warnings* warnings) {
  check_window(grid, u0.positive.grid);
  const double norm = state_norm(u0, ev);
  if (norm == 0.0) {
    return 0.0;
  }
  const FourierImage evolved = apply_symbol(u0, [&](double l) { return p(l) * std::polar(1.0, t * a(l)); });
  double worst = 0.0;
  for (Chamber s : {Chamber::positive, Chamber::negative}) {
    const HorocycleFunction lhs = isometry_T(evolved, grid, s, ev, warnings);
    const HorocycleFunction ts = isometry_T(u0, grid, s, ev, warnings);
    const double sign = s == Chamber::positive ? 1.0 : -1.0;
    const HorocycleFunction rhs = columns_1d(
        ts, [&](double xi) { return p(sign * xi) * std::polar(1.0, t * a(sign * xi)); }, 8, warnings);
    worst = std::max(worst, horocycle_distance(lhs, rhs) / norm);
  }
  return worst;
}

double schrodinger_intertwine_check(const FourierImage& u0, double t, const HorocycleGrid& grid,
                                    const CFunctionEvaluator& ev, Warnings* warnings) {
  check_window(grid, u0.positive.grid);
  const double norm = state_norm(u0, ev);
  if (norm == 0.0) {
    return 0.0;
  }
  const double rho = ev.root_data().rho();
  const Multiplier a = schrodinger_multiplier(rho);
  const FourierImage evolved = propagate(a, t, u0).snapshot;
  const HorocycleFunction lhs = isometry_T(evolved, grid, Chamber::both, ev, warnings);
  const HorocycleFunction tu = isometry_T(u0, grid, Chamber::both, ev, warnings);
  const Multiplier free = free_schrodinger_1d();
  const Complex phase = std::polar(1.0, t * rho * rho);
  const HorocycleFunction rhs =
      columns_1d(tu, [&](double xi) { return phase * std::polar(1.0, t * free(xi)); }, 8, warnings);
  return horocycle_distance(lhs, rhs) / norm;
}

}  // namespace hypharm
