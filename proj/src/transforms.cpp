#include "hypharm/transforms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

#include "hypharm/fft.hpp"

namespace hypharm {
namespace {

constexpr double kRho = 0.5;

double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (const auto& x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

void require_matching_angles(int n_theta, int n_b, const char* what) {
  if (n_theta != n_b) {
    throw GridError(std::string(what) + ": n_b (" + std::to_string(n_b) + ") must equal n_theta (" +
                    std::to_string(n_theta) + ")");
  }
}

// log P(r_i, theta_l) for every ring and angular offset of the grid.
std::vector<double> log_poisson_table(const PolarGrid& g) {
  const int n = g.n_theta();
  std::vector<double> t(g.size());
  for (int i = 0; i < g.n_r(); ++i) {
    for (int l = 0; l < n; ++l) {
      t[g.index(i, l)] = log_poisson(g.r(i), g.theta(l));
    }
  }
  return t;
}

void check_support(const FunctionOnX& u, Warnings* warnings, const char* what) {
  const PolarGrid& g = u.grid;
  const double mx = max_abs(u.values);
  if (mx == 0.0) {
    return;
  }
  double outer = 0.0;
  for (int i = std::max(0, g.n_r() - 2); i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      outer = std::max(outer, std::abs(u.at(i, j)));
    }
  }
  if (outer > 1e-8 * mx) {
    warn(warnings, std::string(what) + ": support leakage, outer rings at " + std::to_string(outer / mx) +
                       " of max");
  }
}

// Cubic Lagrange stencil in r on the nodes k dr (k = +-1, +-2, ...); the
// r = 0 node is never used.
struct RadialStencil {
  int node[4];
  double weight[4];
};

RadialStencil radial_stencil(double r, double dr) {
  const double x = r / dr;
  const int k0 = static_cast<int>(std::floor(x));
  RadialStencil s{};
  for (int q = 0; q < 4; ++q) {
    int k = k0 - 1 + q;
    if (k <= 0) {
      k -= 1;
    }
    s.node[q] = k;
  }
  for (int q = 0; q < 4; ++q) {
    double w = 1.0;
    for (int p = 0; p < 4; ++p) {
      if (p != q) {
        w *= (x - s.node[p]) / static_cast<double>(s.node[q] - s.node[p]);
      }
    }
    s.weight[q] = w;
  }
  return s;
}

// Applies e^{-rho H} m(D_H) e^{rho H} to every b-column of phi.
HorocycleFunction conjugated_multiplier(const HorocycleFunction& phi, const std::function<Complex(double)>& m,
                                        Warnings* warnings, const char* what) {
  const HorocycleGrid& g = phi.grid;
  const int np = g.n_points();
  const int n_fft = fft::next_pow2(4 * np);
  const double dh = g.dh();
  std::vector<Complex> symbol(static_cast<std::size_t>(n_fft));
  for (int q = 0; q < n_fft; ++q) {
    symbol[static_cast<std::size_t>(q)] = m(2.0 * kPi * fft::signed_bin(q, n_fft) / (n_fft * dh));
  }
  std::vector<double> up(static_cast<std::size_t>(np));
  for (int p = 0; p < np; ++p) {
    up[static_cast<std::size_t>(p)] = std::exp(kRho * g.h(p));
  }
  const int taper_len = std::max(1, np / 10);
  int tapered = 0;
  HorocycleFunction out(g);
  std::vector<Complex> buf(static_cast<std::size_t>(n_fft));
  for (int k = 0; k < g.n_b(); ++k) {
    std::fill(buf.begin(), buf.end(), Complex{});
    double mx = 0.0;
    for (int p = 0; p < np; ++p) {
      buf[static_cast<std::size_t>(p)] = up[static_cast<std::size_t>(p)] * phi.at(p, k);
      mx = std::max(mx, std::abs(buf[static_cast<std::size_t>(p)]));
    }
    if (mx == 0.0) {
      continue;
    }
    if (std::abs(buf[0]) > 1e-6 * mx || std::abs(buf[static_cast<std::size_t>(np - 1)]) > 1e-6 * mx) {
      ++tapered;
      for (int p = 0; p < taper_len; ++p) {
        const double f = 0.5 * (1.0 - std::cos(kPi * p / taper_len));
        buf[static_cast<std::size_t>(p)] *= f;
        buf[static_cast<std::size_t>(np - 1 - p)] *= f;
      }
    }
    fft::forward(buf);
    for (int q = 0; q < n_fft; ++q) {
      buf[static_cast<std::size_t>(q)] *= symbol[static_cast<std::size_t>(q)];
    }
    fft::backward(buf);
    for (int p = 0; p < np; ++p) {
      out.at(p, k) = buf[static_cast<std::size_t>(p)] / (static_cast<double>(n_fft) * up[static_cast<std::size_t>(p)]);
    }
  }
  if (tapered > 0) {
    warn(warnings, std::string(what) + ": e^{rho H} phi not decayed at |H| = H_max for " +
                       std::to_string(tapered) + " of " + std::to_string(g.n_b()) + " directions; taper applied");
  }
  return out;
}

}  // namespace

double log_poisson(double r, double angle_offset) {
  const double s = std::sin(0.5 * angle_offset);
  return -std::log(std::exp(-r) + 2.0 * std::sinh(r) * s * s);
}

std::vector<FourierImage> helgason_forward_batch(const std::vector<FunctionOnX>& functions,
                                                 const SpectralGrid& grid, Warnings* warnings) {
  if (functions.empty()) {
    return {};
  }
  const PolarGrid& pg = functions.front().grid;
  for (const auto& u : functions) {
    if (!(u.grid == pg)) {
      throw GridError("helgason_forward_batch: functions live on different grids");
    }
    check_support(u, warnings, "helgason_forward");
  }
  const int n = pg.n_theta();
  require_matching_angles(n, grid.n_b(), "helgason_forward");
  const int nr = pg.n_r();
  const std::size_t nf = functions.size();
  const auto un = static_cast<std::size_t>(n);

  std::vector<Complex> spectra(nf * static_cast<std::size_t>(nr) * un);
  for (std::size_t f = 0; f < nf; ++f) {
    for (int i = 0; i < nr; ++i) {
      Complex* row = &spectra[(f * nr + i) * un];
      const double w = pg.radial_weight(i) * pg.dtheta();
      for (int l = 0; l < n; ++l) {
        row[l] = functions[f].at(i, l);
      }
      fft::forward(std::span<Complex>(row, un));
      for (int m = 0; m < n; ++m) {
        row[m] *= w;
      }
    }
  }

  const auto log_p = log_poisson_table(pg);
  std::vector<double> damp(log_p.size());
  for (std::size_t q = 0; q < log_p.size(); ++q) {
    damp[q] = std::exp(kRho * log_p[q]);
  }

  std::vector<FourierImage> out(nf, FourierImage{SpectralTable(grid, +1), SpectralTable(grid, -1)});
  std::vector<Complex> kernel(un);
  std::vector<Complex> acc_pos(nf * un);
  std::vector<Complex> acc_neg(nf * un);
  for (int j = 0; j < grid.n_lambda(); ++j) {
    const double lambda = grid.lambda(j);
    std::fill(acc_pos.begin(), acc_pos.end(), Complex{});
    std::fill(acc_neg.begin(), acc_neg.end(), Complex{});
    for (int i = 0; i < nr; ++i) {
      const std::size_t base = pg.index(i, 0);
      for (int l = 0; l < n; ++l) {
        kernel[static_cast<std::size_t>(l)] = damp[base + l] * std::polar(1.0, -lambda * log_p[base + l]);
      }
      fft::forward(kernel);
      for (std::size_t f = 0; f < nf; ++f) {
        const Complex* u_hat = &spectra[(f * nr + i) * un];
        Complex* ap = &acc_pos[f * un];
        Complex* an = &acc_neg[f * un];
        for (int m = 0; m < n; ++m) {
          ap[m] += u_hat[m] * kernel[static_cast<std::size_t>((n - m) % n)];
          an[m] += u_hat[m] * std::conj(kernel[static_cast<std::size_t>(m)]);
        }
      }
    }
    for (std::size_t f = 0; f < nf; ++f) {
      std::span<Complex> ap(&acc_pos[f * un], un);
      std::span<Complex> an(&acc_neg[f * un], un);
      fft::backward(ap);
      fft::backward(an);
      for (int k = 0; k < n; ++k) {
        out[f].positive.at(j, k) = ap[static_cast<std::size_t>(k)] / static_cast<double>(n);
        out[f].negative.at(j, k) = an[static_cast<std::size_t>(k)] / static_cast<double>(n);
      }
    }
  }
  return out;
}

FourierImage helgason_forward_both(const FunctionOnX& u, const SpectralGrid& grid, Warnings* warnings) {
  return helgason_forward_batch({u}, grid, warnings).front();
}

SpectralTable helgason_forward(const FunctionOnX& u, const SpectralGrid& grid, int chamber, Warnings* warnings) {
  if (chamber != 1 && chamber != -1) {
    throw DomainError("helgason_forward: chamber must be +1 or -1");
  }
  FourierImage image = helgason_forward_both(u, grid, warnings);
  return chamber > 0 ? std::move(image.positive) : std::move(image.negative);
}

Complex helgason_forward_at(const FunctionOnX& u, double lambda, double beta) {
  const PolarGrid& g = u.grid;
  const Complex exponent(kRho, -lambda);
  Complex sum = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    Complex ring = 0.0;
    for (int j = 0; j < g.n_theta(); ++j) {
      ring += u.at(i, j) * std::exp(exponent * log_poisson(g.r(i), g.theta(j) - beta));
    }
    sum += ring * g.radial_weight(i) * g.dtheta();
  }
  return sum;
}

FunctionOnX helgason_inverse(const SpectralTable& table, const PolarGrid& grid, const CFunctionEvaluator& ev,
                             Warnings* warnings) {
  const SpectralGrid& sg = table.grid;
  const int n = grid.n_theta();
  require_matching_angles(n, sg.n_b(), "helgason_inverse");
  const auto un = static_cast<std::size_t>(n);
  const int nr = grid.n_r();

  const double mx = max_abs(table.values);
  if (mx > 0.0) {
    double last = 0.0;
    for (int k = 0; k < sg.n_b(); ++k) {
      last = std::max(last, std::abs(table.at(sg.n_lambda() - 1, k)));
    }
    if (last > 1e-8 * mx) {
      warn(warnings, "helgason_inverse: spectral truncation, |F| at lambda_max is " + std::to_string(last / mx) +
                         " of max");
    }
  }

  const auto log_p = log_poisson_table(grid);
  std::vector<double> damp(log_p.size());
  for (std::size_t q = 0; q < log_p.size(); ++q) {
    damp[q] = std::exp(kRho * log_p[q]);
  }
  std::vector<Complex> acc(grid.size());
  std::vector<Complex> row(un);
  std::vector<Complex> kernel(un);
  for (int j = 0; j < sg.n_lambda(); ++j) {
    const double lambda = table.signed_lambda(j);
    const double weight =
        measure::kSpectralMeasure * sg.dlambda() * ev.plancherel_density(lambda) / static_cast<double>(sg.n_b());
    bool empty = true;
    for (int k = 0; k < n; ++k) {
      row[static_cast<std::size_t>(k)] = table.at(j, k);
      empty = empty && table.at(j, k) == Complex{};
    }
    if (empty || weight == 0.0) {
      continue;
    }
    fft::forward(row);
    for (int i = 0; i < nr; ++i) {
      const std::size_t base = grid.index(i, 0);
      for (int l = 0; l < n; ++l) {
        kernel[static_cast<std::size_t>(l)] = damp[base + l] * std::polar(1.0, lambda * log_p[base + l]);
      }
      fft::forward(kernel);
      Complex* a = &acc[base];
      for (int m = 0; m < n; ++m) {
        a[m] += weight * row[static_cast<std::size_t>(m)] * kernel[static_cast<std::size_t>(m)];
      }
    }
  }
  FunctionOnX u(grid);
  for (int i = 0; i < nr; ++i) {
    std::span<Complex> a(&acc[grid.index(i, 0)], un);
    fft::backward(a);
    for (int l = 0; l < n; ++l) {
      u.at(i, l) = a[static_cast<std::size_t>(l)] / static_cast<double>(n);
    }
  }
  return u;
}

double plancherel_norm(const SpectralTable& table, const CFunctionEvaluator& ev) {
  const SpectralGrid& sg = table.grid;
  double s = 0.0;
  for (int j = 0; j < sg.n_lambda(); ++j) {
    double row = 0.0;
    for (int k = 0; k < sg.n_b(); ++k) {
      row += std::norm(table.at(j, k));
    }
    s += row * ev.plancherel_density(table.signed_lambda(j));
  }
  return std::sqrt(s * measure::kSpectralMeasure * sg.dlambda() / sg.n_b());
}

Complex spherical_function(double lambda, double r) {
  if (r < 0.0) {
    throw DomainError("spherical_function: r must be nonnegative");
  }
  if (r == 0.0) {
    return 1.0;
  }
  using boost::math::quadrature::gauss_kronrod;
  const Complex exponent(kRho, lambda);
  auto re = [&](double beta) { return std::real(std::exp(exponent * log_poisson(r, beta))); };
  auto im = [&](double beta) { return std::imag(std::exp(exponent * log_poisson(r, beta))); };
  std::vector<double> breaks{0.0};
  for (double x = std::exp(-r); x < kPi; x *= 2.0) {
    breaks.push_back(x);
  }
  breaks.push_back(kPi);
  double sum_re = 0.0;
  double sum_im = 0.0;
  for (std::size_t q = 0; q + 1 < breaks.size(); ++q) {
    sum_re += gauss_kronrod<double, 31>::integrate(re, breaks[q], breaks[q + 1], 10, 1e-12);
    sum_im += gauss_kronrod<double, 31>::integrate(im, breaks[q], breaks[q + 1], 10, 1e-12);
  }
  return Complex(sum_re, sum_im) / kPi;
}

HorocycleFunction radon_forward(const FunctionOnX& u, const HorocycleGrid& grid, const RadonOptions& options,
                                Warnings* warnings) {
  const PolarGrid& pg = u.grid;
  const int n = pg.n_theta();
  require_matching_angles(n, grid.n_b(), "radon_forward");
  if (options.n_s < 3 || options.n_s % 2 == 0 || !(options.s_max > 0.0)) {
    throw GridError("radon_forward: need odd n_s >= 3 and s_max > 0");
  }
  const auto un = static_cast<std::size_t>(n);
  const int nr = pg.n_r();
  const double dr = pg.dr();
  const double r_max = pg.r_max();

  // Angular Fourier coefficients per ring: u(r_i, theta) = sum_m c_m e^{i m theta}.
  std::vector<Complex> coeff(pg.size());
  for (int i = 0; i < nr; ++i) {
    std::span<Complex> row(&coeff[pg.index(i, 0)], un);
    for (int l = 0; l < n; ++l) {
      row[static_cast<std::size_t>(l)] = u.at(i, l) / static_cast<double>(n);
    }
    fft::forward(row);
  }
  std::vector<int> parity(un);
  for (int m = 0; m < n; ++m) {
    parity[static_cast<std::size_t>(m)] = (fft::signed_bin(m, n) % 2 == 0) ? 1 : -1;
  }
  const double u_max = max_abs(u.values);

  auto ring_value = [&](int node, int m) -> Complex {
    const int i = std::abs(node) - 1;
    if (i >= nr) {
      return 0.0;
    }
    const Complex c = coeff[pg.index(i, 0) + static_cast<std::size_t>(m)];
    return node < 0 ? static_cast<double>(parity[static_cast<std::size_t>(m)]) * c : c;
  };

  HorocycleFunction out(grid);
  std::vector<Complex> acc(un);
  std::vector<Complex> phase(un);
  int truncated = 0;
  const int half = n / 2;
  for (int p = 0; p < grid.n_points(); ++p) {
    const double h = grid.h(p);
    if (std::abs(h) >= r_max) {
      continue;
    }
    const double e_h = std::exp(h);
    double s_h = std::sqrt(2.0 * (std::cosh(r_max) - std::cosh(h)) / e_h);
    bool cut = false;
    if (s_h > options.s_max) {
      s_h = options.s_max;
      cut = true;
    }
    const double ds = 2.0 * s_h / (options.n_s - 1);
    std::fill(acc.begin(), acc.end(), Complex{});
    double edge = 0.0;
    for (int q = 0; q < options.n_s; ++q) {
      const double s = -s_h + q * ds;
      const double y = 2.0 * std::sinh(0.5 * h) * std::sinh(0.5 * h) + 0.5 * e_h * s * s;
      const double r = std::log1p(y + std::sqrt(y * (y + 2.0)));
      if (r >= r_max) {
        continue;
      }
      const Complex w = e_h * Complex(s, 1.0);
      const double theta0 = std::arg((w - kI) / (w + kI));
      const double trap = (q == 0 || q == options.n_s - 1) ? 0.5 : 1.0;
      const double weight = trap * ds * measure::kNMeasure;
      const RadialStencil st = radial_stencil(r, dr);

      const Complex step = std::polar(1.0, theta0);
      Complex power = 1.0;
      for (int m = 0; m < half; ++m) {
        phase[static_cast<std::size_t>(m)] = power;
        if (m > 0) {
          phase[static_cast<std::size_t>(n - m)] = std::conj(power);
        }
        power *= step;
      }
      phase[static_cast<std::size_t>(half)] = std::cos(half * theta0);

      Complex point_value = 0.0;
      for (int m = 0; m < n; ++m) {
        Complex v = 0.0;
        for (int t = 0; t < 4; ++t) {
          v += st.weight[t] * ring_value(st.node[t], m);
        }
        const Complex term = v * phase[static_cast<std::size_t>(m)];
        acc[static_cast<std::size_t>(m)] += weight * term;
        if (cut && (q == 0 || q == options.n_s - 1)) {
          point_value += term;
        }
      }
      edge = std::max(edge, std::abs(point_value));
    }
    if (cut && edge > 1e-8 * u_max) {
      ++truncated;
    }
    fft::backward(acc);
    for (int k = 0; k < n; ++k) {
      out.at(p, k) = acc[static_cast<std::size_t>(k)];
    }
  }
  if (truncated > 0) {
    warn(warnings, "radon_forward: integrand not decayed at |s| = S_max on " + std::to_string(truncated) +
                       " horocycle levels");
  }
  return out;
}

FunctionOnX dual_radon(const HorocycleFunction& phi, const PolarGrid& grid, Warnings* warnings) {
  const HorocycleGrid& hg = phi.grid;
  const int nb = hg.n_b();
  const double h_max = hg.h_max();
  const double dh = hg.dh();
  FunctionOnX out(grid);
  long uncovered = 0;
  for (int i = 0; i < grid.n_r(); ++i) {
    const double r = grid.r(i);
    for (int l = 0; l < grid.n_theta(); ++l) {
      Complex sum = 0.0;
      for (int k = 0; k < nb; ++k) {
        const double a = log_poisson(r, grid.theta(l) - hg.b(k));
        const double pos = (a + h_max) / dh;
        if (pos < 0.0 || pos > hg.n_h()) {
          ++uncovered;
          continue;
        }
        int i0 = static_cast<int>(std::floor(pos));
        double t = pos - i0;
        if (i0 >= hg.n_h()) {
          i0 = hg.n_h() - 1;
          t = 1.0;
        }
        sum += std::exp(a) * ((1.0 - t) * phi.at(i0, k) + t * phi.at(i0 + 1, k));
      }
      out.at(i, l) = sum / static_cast<double>(nb);
    }
  }
  if (uncovered > 0) {
    warn(warnings, "dual_radon: " + std::to_string(uncovered) +
                       " (x, b) pairs with A(x, b) outside [-H_max, H_max] read as 0");
  }
  return out;
}

HorocycleFunction lambda_op(const HorocycleFunction& phi, bool conjugate, const CFunctionEvaluator& ev,
                            Warnings* warnings) {
  if (conjugate) {
    return conjugated_multiplier(phi, [&](double l) { return std::conj(ev.c_inverse(l)); }, warnings, "lambda_op");
  }
  return conjugated_multiplier(phi, [&](double l) { return ev.c_inverse(l); }, warnings, "lambda_op");
}

HorocycleFunction lambda_bar_lambda(const HorocycleFunction& phi, const CFunctionEvaluator& ev, Warnings* warnings) {
  return conjugated_multiplier(phi, [&](double l) { return Complex(ev.plancherel_density(l)); }, warnings,
                               "lambda_bar_lambda");
}

FunctionOnX radon_inverse(const FunctionOnX& u, const HorocycleGrid& horocycles, const CFunctionEvaluator& ev,
                          const RadonOptions& options, Warnings* warnings) {
  const HorocycleFunction ru = radon_forward(u, horocycles, options, warnings);
  const HorocycleFunction filtered = lambda_bar_lambda(ru, ev, warnings);
  FunctionOnX back = dual_radon(filtered, u.grid, warnings);
  return (1.0 / measure::kWeylOrder) * back;
}

HorocycleFunction isometry_T(const FourierImage& image, const HorocycleGrid& grid, Chamber chamber,
                             const CFunctionEvaluator& ev, Warnings* warnings) {
  const SpectralGrid& sg = image.positive.grid;
  if (!(image.negative.grid == sg)) {
    throw GridError("isometry_T: chambers sampled on different grids");
  }
  const int nb = sg.n_b();
  if (grid.n_b() != nb) {
    throw GridError("isometry_T: horocycle grid and spectral grid disagree on n_b");
  }
  const int nl = sg.n_lambda();
  const bool use_pos = chamber != Chamber::negative;
  const bool use_neg = chamber != Chamber::positive;
  std::vector<Complex> gp(sg.size());
  std::vector<Complex> gn(sg.size());
  for (int j = 0; j < nl; ++j) {
    const double lambda = sg.lambda(j);
    const Complex cp = use_pos ? ev.c_inverse(lambda) : 0.0;
    const Complex cn = use_neg ? ev.c_inverse(-lambda) : 0.0;
    for (int k = 0; k < nb; ++k) {
      gp[sg.index(j, k)] = image.positive.at(j, k) * cp;
      gn[sg.index(j, k)] = image.negative.at(j, k) * cn;
    }
  }
  const double mx = std::max(max_abs(gp), max_abs(gn));
  if (mx > 0.0) {
    double last = 0.0;
    for (int k = 0; k < nb; ++k) {
      last = std::max({last, std::abs(gp[sg.index(nl - 1, k)]), std::abs(gn[sg.index(nl - 1, k)])});
    }
    if (last > 1e-8 * mx) {
      warn(warnings, "isometry_T: spectral truncation, |F c^{-1}| at lambda_max is " + std::to_string(last / mx) +
                         " of max");
    }
  }
  const double weight = measure::kSpectralMeasure * sg.dlambda();
  HorocycleFunction out(grid);
  std::vector<Complex> acc(static_cast<std::size_t>(nb));
  for (int p = 0; p < grid.n_points(); ++p) {
    const double h = grid.h(p);
    std::fill(acc.begin(), acc.end(), Complex{});
    for (int j = 0; j < nl; ++j) {
      const Complex e = std::polar(weight, sg.lambda(j) * h);
      const Complex ec = std::conj(e);
      const std::size_t base = sg.index(j, 0);
      for (int k = 0; k < nb; ++k) {
        acc[static_cast<std::size_t>(k)] += e * gp[base + k] + ec * gn[base + k];
      }
    }
    for (int k = 0; k < nb; ++k) {
      out.at(p, k) = acc[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

SpectralTable radon_to_fourier(const HorocycleFunction& radon, const SpectralGrid& grid, int chamber) {
  const HorocycleGrid& hg = radon.grid;
  if (hg.n_b() != grid.n_b()) {
    throw GridError("radon_to_fourier: boundary grids differ");
  }
  SpectralTable out(grid, chamber);
  std::vector<Complex> kernel(static_cast<std::size_t>(hg.n_points()));
  for (int j = 0; j < grid.n_lambda(); ++j) {
    const double lambda = out.signed_lambda(j);
    for (int p = 0; p < hg.n_points(); ++p) {
      const double h = hg.h(p);
      const double end = (p == 0 || p == hg.n_h()) ? 0.5 : 1.0;
      kernel[static_cast<std::size_t>(p)] = end * hg.dh() * measure::kHMeasure * std::exp(Complex(kRho, -lambda) * h);
    }
    for (int k = 0; k < grid.n_b(); ++k) {
      Complex s = 0.0;
      for (int p = 0; p < hg.n_points(); ++p) {
        s += kernel[static_cast<std::size_t>(p)] * radon.at(p, k);
      }
      out.at(j, k) = s;
    }
  }
  return out;
}

double projection_slice_residual(const FunctionOnX& u, const HorocycleGrid& horocycles, const SpectralGrid& grid,
                                 const RadonOptions& options, Warnings* warnings) {
  const SpectralTable direct = helgason_forward(u, grid, +1, warnings);
  const SpectralTable slice = radon_to_fourier(radon_forward(u, horocycles, options, warnings), grid, +1);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t q = 0; q < direct.values.size(); ++q) {
    num += std::norm(slice.values[q] - direct.values[q]);
    den += std::norm(direct.values[q]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double adjointness_residual(const FunctionOnX& u, const HorocycleFunction& phi, const RadonOptions& options,
                            Warnings* warnings) {
  const Complex xi_side = horocycle_pairing(radon_forward(u, phi.grid, options, warnings), phi);
  const Complex x_side = integrate_product(u, dual_radon(phi, u.grid, warnings));
  const double scale = std::abs(x_side);
  return scale > 0.0 ? std::abs(xi_side - x_side) / scale : std::abs(xi_side);
}

PeriodicTransfer::PeriodicTransfer(const SpectralGrid& grid, const CFunctionEvaluator& ev) : grid_(grid) {
  const int n = grid.n_lambda();
  const int big_n = 2 * n;
  c_pos_.resize(static_cast<std::size_t>(n));
  c_neg_.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    c_pos_[static_cast<std::size_t>(j)] = ev.c_inverse(grid.lambda(j));
    c_neg_[static_cast<std::size_t>(j)] = ev.c_inverse(-grid.lambda(j));
  }
  post_.resize(static_cast<std::size_t>(big_n));
  const double weight = measure::kSpectralMeasure * grid.dlambda();
  for (int p = 0; p < big_n; ++p) {
    const double sign = ((p + n) % 2 == 0) ? 1.0 : -1.0;
    post_[static_cast<std::size_t>(p)] = sign * std::polar(weight, kPi * (p - n) / big_n);
  }
}

PeriodicHorocycleFunction PeriodicTransfer::apply(const FourierImage& image, Chamber chamber,
                                                  const SpectralSymbol& symbol) const {
  const int n = grid_.n_lambda();
  std::vector<Complex> sp(static_cast<std::size_t>(n), 1.0);
  std::vector<Complex> sn(static_cast<std::size_t>(n), 1.0);
  if (symbol) {
    for (int j = 0; j < n; ++j) {
      sp[static_cast<std::size_t>(j)] = symbol(grid_.lambda(j));
      sn[static_cast<std::size_t>(j)] = symbol(-grid_.lambda(j));
    }
  }
  return apply(image, chamber, sp, sn);
}

PeriodicHorocycleFunction PeriodicTransfer::apply(const FourierImage& image, Chamber chamber,
                                                  const std::vector<Complex>& symbol_positive,
                                                  const std::vector<Complex>& symbol_negative) const {
  if (!(image.positive.grid == grid_)) {
    throw GridError("PeriodicTransfer: image lives on a different spectral grid");
  }
  const int n = grid_.n_lambda();
  const int big_n = 2 * n;
  const int nb = grid_.n_b();
  PeriodicHorocycleFunction out;
  out.dh = 2.0 * kPi / (big_n * grid_.dlambda());
  out.n_h = big_n;
  out.n_b = nb;
  out.values.assign(static_cast<std::size_t>(big_n) * nb, Complex{});

  const bool use_pos = chamber != Chamber::negative;
  const bool use_neg = chamber != Chamber::positive;
  std::vector<Complex> mp(static_cast<std::size_t>(n));
  std::vector<Complex> mn(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < mp.size(); ++j) {
    mp[j] = use_pos ? c_pos_[j] * symbol_positive[j] : 0.0;
    mn[j] = use_neg ? c_neg_[j] * symbol_negative[j] : 0.0;
  }
  std::vector<Complex> buf(static_cast<std::size_t>(big_n));
  for (int k = 0; k < nb; ++k) {
    for (int q = 0; q < big_n; ++q) {
      Complex g;
      if (q < n) {
        const int j = n - 1 - q;
        g = image.negative.at(j, k) * mn[static_cast<std::size_t>(j)];
      } else {
        const int j = q - n;
        g = image.positive.at(j, k) * mp[static_cast<std::size_t>(j)];
      }
      buf[static_cast<std::size_t>(q)] = (q % 2 == 0) ? g : -g;
    }
    fft::backward(buf);
    for (int p = 0; p < big_n; ++p) {
      out.at(p, k) = post_[static_cast<std::size_t>(p)] * buf[static_cast<std::size_t>(p)];
    }
  }
  return out;
}

PeriodicTransfer::Columns PeriodicTransfer::columns(const FourierImage& image, Chamber chamber) const {
  if (!(image.positive.grid == grid_)) {
    throw GridError("PeriodicTransfer: image lives on a different spectral grid");
  }
  const int n = grid_.n_lambda();
  const int big_n = 2 * n;
  const int nb = grid_.n_b();
  const bool use_pos = chamber != Chamber::negative;
  const bool use_neg = chamber != Chamber::positive;
  Columns c;
  c.n_h = big_n;
  c.n_b = nb;
  c.values.assign(static_cast<std::size_t>(big_n) * nb, Complex{});
  for (int q = 0; q < big_n; ++q) {
    const double sign = (q % 2 == 0) ? 1.0 : -1.0;
    const bool neg = q < n;
    if (neg ? !use_neg : !use_pos) {
      continue;
    }
    const int j = neg ? n - 1 - q : q - n;
    const SpectralTable& table = neg ? image.negative : image.positive;
    const Complex m = sign * (neg ? c_neg_ : c_pos_)[static_cast<std::size_t>(j)];
    for (int k = 0; k < nb; ++k) {
      c.values[static_cast<std::size_t>(k) * big_n + q] = table.at(j, k) * m;
    }
  }
  return c;
}

double PeriodicTransfer::weighted_sum_sq(const Columns& columns, const std::vector<Complex>& symbol_positive,
                                         const std::vector<Complex>& symbol_negative,
                                         const std::vector<double>& weight) const {
  const int n = grid_.n_lambda();
  const int big_n = 2 * n;
  if (columns.n_h != big_n || columns.n_b != grid_.n_b() || static_cast<int>(weight.size()) != big_n) {
    throw GridError("PeriodicTransfer: column data or weight does not match the grid");
  }
  std::vector<Complex> sym(static_cast<std::size_t>(big_n));
  std::vector<double> w(static_cast<std::size_t>(big_n));
  for (int q = 0; q < big_n; ++q) {
    sym[static_cast<std::size_t>(q)] = q < n ? symbol_negative[static_cast<std::size_t>(n - 1 - q)]
                                             : symbol_positive[static_cast<std::size_t>(q - n)];
    w[static_cast<std::size_t>(q)] = weight[static_cast<std::size_t>(q)] * std::norm(post_[static_cast<std::size_t>(q)]);
  }
  std::vector<Complex> buf(static_cast<std::size_t>(big_n));
  double total = 0.0;
  for (int k = 0; k < columns.n_b; ++k) {
    const Complex* col = &columns.values[static_cast<std::size_t>(k) * big_n];
    for (int q = 0; q < big_n; ++q) {
      buf[static_cast<std::size_t>(q)] = col[q] * sym[static_cast<std::size_t>(q)];
    }
    fft::backward(buf);
    for (int p = 0; p < big_n; ++p) {
      total += w[static_cast<std::size_t>(p)] * std::norm(buf[static_cast<std::size_t>(p)]);
    }
  }
  return total;
}

PeriodicHorocycleFunction isometry_T_periodic(const FourierImage& image, Chamber chamber,
                                              const CFunctionEvaluator& ev, const SpectralSymbol& symbol) {
  return PeriodicTransfer(image.positive.grid, ev).apply(image, chamber, symbol);
}

WeightedNormResult weighted_norm_periodic(const PeriodicHorocycleFunction& f, double delta) {
  const double half_period = 0.5 * f.n_h * f.dh;
  double total = 0.0;
  double tail = 0.0;
  for (int p = 0; p < f.n_h; ++p) {
    const double h = f.h(p);
    const double w = std::pow(bracket(h), 2.0 * delta);
    double row = 0.0;
    for (int k = 0; k < f.n_b; ++k) {
      row += std::norm(f.at(p, k));
    }
    total += w * row;
    if (std::abs(h) > 0.8 * half_period) {
      tail += w * row;
    }
  }
  WeightedNormResult res;
  const double scale = kPi * f.dh / (measure::kWeylOrder * f.n_b);
  res.norm = std::sqrt(total * scale);
  res.tail_fraction = total > 0.0 ? tail / total : 0.0;
  res.divergent = delta > 0.0 && res.tail_fraction > 0.01;
  return res;
}

WeightedNormResult weighted_norm(const FourierImage& image, double delta, const CFunctionEvaluator& ev,
                                 Warnings* warnings) {
  const WeightedNormResult res = weighted_norm_periodic(isometry_T_periodic(image, Chamber::both, ev), delta);
  if (res.divergent) {
    warn(warnings, "weighted_norm: H-grid tail carries " + std::to_string(100.0 * res.tail_fraction) +
                       "% of the norm for delta = " + std::to_string(delta));
  }
  return res;
}

WeightedNormResult weighted_norm(const FunctionOnX& u, const SpectralGrid& grid, double delta,
                                 const CFunctionEvaluator& ev, Warnings* warnings) {
  return weighted_norm(helgason_forward_both(u, grid, warnings), delta, ev, warnings);
}

double horocycle_isometry_norm(const HorocycleFunction& f) {
  const HorocycleGrid& g = f.grid;
  double s = 0.0;
  for (int p = 0; p < g.n_points(); ++p) {
    double row = 0.0;
    for (int k = 0; k < g.n_b(); ++k) {
      row += std::norm(f.at(p, k));
    }
    s += g.simpson_weight(p) * row;
  }
  return std::sqrt(s * g.dh() * measure::kHMeasure / (measure::kWeylOrder * g.n_b()));
}

Complex horocycle_pairing(const HorocycleFunction& f, const HorocycleFunction& g) {
  if (!(f.grid == g.grid)) {
    throw GridError("horocycle_pairing: operands live on different grids");
  }
  const HorocycleGrid& hg = f.grid;
  Complex s = 0.0;
  for (int p = 0; p < hg.n_points(); ++p) {
    Complex row = 0.0;
    for (int k = 0; k < hg.n_b(); ++k) {
      row += f.at(p, k) * g.at(p, k);
    }
    s += hg.simpson_weight(p) * std::exp(2.0 * kRho * hg.h(p)) * row;
  }
  return s * hg.dh() * measure::kHMeasure / static_cast<double>(hg.n_b());
}

ExperimentReport compact_support_embedding_check(const std::vector<FunctionOnX>& family, int k,
                                                 double support_radius, const SpectralGrid& grid,
                                                 const CFunctionEvaluator& ev) {
  if (k < 0) {
    throw DomainError("compact_support_embedding_check: k must be nonnegative");
  }
  ExperimentReport report;
  report.experiment = "compact_support_embedding_check";
  report.paper_ref = "compact-support embeddings of the weighted L2 spaces";
  report.family = "fixed_support_bumps";
  report.grid_meta = {{"lambda_max", grid.lambda_max()},
                      {"n_lambda", grid.n_lambda()},
                      {"n_b", grid.n_b()},
                      {"k", k},
                      {"support_radius", support_radius}};
  const double delta = 2.0 * k;
  const auto images = helgason_forward_batch(family, grid, &report.warnings);
  double max_up = 0.0;
  double max_down = 0.0;
  bool divergent = false;
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t f = 0; f < family.size(); ++f) {
    const double plain = l2_norm(family[f]);
    const WeightedNormResult weighted = weighted_norm(images[f], delta, ev, &report.warnings);
    FunctionOnX local = family[f];
    for (int i = 0; i < local.grid.n_r(); ++i) {
      if (local.grid.r(i) > support_radius) {
        for (int j = 0; j < local.grid.n_theta(); ++j) {
          local.at(i, j) = 0.0;
        }
      }
    }
    const double up = safe_ratio(weighted.norm, plain);
    const double down = safe_ratio(l2_norm(local), weighted.norm);
    divergent = divergent || weighted.divergent;
    max_up = std::max(max_up, up);
    max_down = std::max(max_down, down);
    members.push_back({{"index", f}, {"weighted_over_l2", up}, {"local_over_weighted", down}});
  }
  report.lhs = max_up;
  report.rhs = max_down;
  report.ratio = max_up;
  report.pass = std::isfinite(max_up) && std::isfinite(max_down) && max_down <= 1.005 && !divergent;
  report.details = {{"members", members}, {"delta", delta}};
  return report;
}

}  // namespace hypharm
