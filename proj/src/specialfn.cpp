#include "hypharm/specialfn.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace hypharm {
namespace {

// B_{2k} / (2k (2k-1)), k = 1..9.
constexpr std::array<double, 9> kStirling = {
    1.0 / 12.0,         -1.0 / 360.0,          1.0 / 1260.0,
    -1.0 / 1680.0,      1.0 / 1188.0,          -691.0 / 360360.0,
    1.0 / 156.0,        -3617.0 / 122400.0,    43867.0 / 244188.0};

constexpr double kStirlingShift = 15.0;
constexpr double kPoleTolerance = 1e-12;

Complex stirling_log_gamma(Complex w) {
  const Complex inv = 1.0 / w;
  const Complex inv2 = inv * inv;
  Complex series = 0.0;
  Complex power = inv;
  for (double coefficient : kStirling) {
    series += coefficient * power;
    power *= inv2;
  }
  return (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi) + series;
}

}  // namespace

Complex log_gamma(Complex z) {
  if (z.real() <= -50.0) {
    throw DomainError("log_gamma: Re z must exceed -50");
  }
  if (z.real() < 0.5) {
    const double nearest = std::round(z.real());
    if (nearest <= 0.0 && std::abs(z - nearest) < kPoleTolerance) {
      throw PoleError("log_gamma: argument within 1e-12 of the pole at " +
                      std::to_string(static_cast<int>(nearest)));
    }
  }
  Complex shift_log = 0.0;
  Complex w = z;
  while (w.real() < kStirlingShift) {
    shift_log += std::log(w);
    w += 1.0;
  }
  return stirling_log_gamma(w) - shift_log;
}

Complex gamma_ratio_s(double xi, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("gamma_ratio_s: a and b must be positive");
  }
  if (a == b) {
    return 1.0;
  }
  return std::exp(log_gamma(Complex(a, xi)) - log_gamma(Complex(b, xi)));
}

SeriesValue gamma_ratio_t(double xi, double a, double b, int terms) {
  if (terms < 1) {
    throw DomainError("gamma_ratio_t: terms must be >= 1");
  }
  if (a == b) {
    return {0.0, 0.0};
  }
  const Complex alpha(a, xi);
  const Complex beta(b, xi);
  Complex sum = 0.0;
  for (int m = terms - 1; m >= 0; --m) {
    const double md = m;
    sum += (a - b) / ((md + alpha) * (md + beta));
  }
  const double x = terms - 0.5;
  const Complex tail = std::log((x + alpha) / (x + beta));
  // Midpoint rule on [m-1/2, m+1/2]: |error| <= sup|f''|/24 with
  // |f''(x)| <= 6|a-b| / (x + min(a,b))^4; summed and bounded by an integral.
  const double c = std::min(a, b);
  const double base = std::max(x - 1.0 + c, 1e-300);
  const double bound = std::abs(a - b) / (12.0 * base * base * base);
  return {kI * (sum + tail), bound};
}

CFunctionEvaluator::CFunctionEvaluator(RootData root_data) : root_data_(root_data) {
  if (root_data_.m_alpha < 1 || root_data_.m_2alpha < 0) {
    throw DomainError("RootData: need m_alpha >= 1 and m_2alpha >= 0");
  }
  bool zero = false;
  const Complex log_c = unnormalized_log_c(Complex(0.0, -root_data_.rho()), &zero);
  c0_ = std::exp(-log_c);
}

CFunctionEvaluator CFunctionEvaluator::unit_symbol(RootData root_data) {
  CFunctionEvaluator ev(root_data);
  ev.unit_symbol_ = true;
  ev.c0_ = 1.0;
  return ev;
}

CFunctionEvaluator CFunctionEvaluator::with_c0(Complex c0) const {
  CFunctionEvaluator ev = *this;
  ev.c0_ = c0;
  return ev;
}

Complex CFunctionEvaluator::unnormalized_log_c(Complex lambda, bool* is_zero) const {
  const Complex z = kI * lambda;
  const double ma = root_data_.m_alpha;
  const double m2a = root_data_.m_2alpha;
  const Complex a1 = 0.5 * (0.5 * ma + 1.0 + z);
  const Complex a2 = 0.5 * (0.5 * ma + m2a + z);
  Complex denominator = 0.0;
  try {
    denominator = log_gamma(a1) + log_gamma(a2);
  } catch (const PoleError&) {
    *is_zero = true;
    return 0.0;
  }
  *is_zero = false;
  return -z * std::log(2.0) + log_gamma(z) - denominator;
}

Complex CFunctionEvaluator::c(Complex lambda) const {
  if (unit_symbol_) {
    return 1.0;
  }
  bool zero = false;
  const Complex log_c = unnormalized_log_c(lambda, &zero);
  if (zero) {
    return 0.0;
  }
  return c0_ * std::exp(log_c);
}

Complex CFunctionEvaluator::c_inverse(double lambda) const {
  if (unit_symbol_) {
    return 1.0;
  }
  if (lambda == 0.0) {
    return 0.0;
  }
  const double ma = root_data_.m_alpha;
  const double m2a = root_data_.m_2alpha;
  const double half = 0.5 * lambda;
  const Complex s1 = gamma_ratio_s(half, 0.25 * ma + 0.5, 0.5);
  const Complex s2 = gamma_ratio_s(half, 0.25 * ma + 0.5 * m2a, 1.0);
  return (std::sqrt(kPi) * kI * lambda) * s1 * s2 / c0_;
}

Complex CFunctionEvaluator::c_inverse_derivative(double lambda) const {
  if (unit_symbol_) {
    return 0.0;
  }
  // c^{-1} = K lambda s1(lambda/2) s2(lambda/2) and s' = s t.
  const double ma = root_data_.m_alpha;
  const double m2a = root_data_.m_2alpha;
  const double half = 0.5 * lambda;
  const double a1 = 0.25 * ma + 0.5;
  const double a2 = 0.25 * ma + 0.5 * m2a;
  const Complex s1 = gamma_ratio_s(half, a1, 0.5);
  const Complex s2 = gamma_ratio_s(half, a2, 1.0);
  const Complex t = gamma_ratio_t(half, a1, 0.5).value + gamma_ratio_t(half, a2, 1.0).value;
  return (std::sqrt(kPi) * kI) * s1 * s2 * (1.0 + half * t) / c0_;
}

double CFunctionEvaluator::plancherel_density(double lambda) const {
  return std::norm(c_inverse(lambda));
}

ExperimentReport symbol_estimate_check(const CFunctionEvaluator& ev, int max_order,
                                       double lambda_max, int points_per_octave) {
  if (max_order < 0 || max_order > 2) {
    throw DomainError("symbol_estimate_check: max_order must be in [0, 2]");
  }
  if (!(lambda_max >= 10.0)) {
    throw DomainError("symbol_estimate_check: lambda_max must be >= 10");
  }
  const int first_octave = -6;
  const double spacing = std::ldexp(1.0, first_octave) * (std::exp2(1.0 / points_per_octave) - 1.0);
  if (points_per_octave < 1 || spacing < 1e-8) {
    throw GridError("symbol_estimate_check: grid spacing underflows 1e-8");
  }

  // Octave index -1 collects [0, 2^first_octave).
  std::vector<double> grid{0.0};
  std::vector<int> octave{first_octave - 1};
  for (int k = first_octave;; ++k) {
    const double lo = std::ldexp(1.0, k);
    if (lo > lambda_max) {
      break;
    }
    for (int j = 0; j < points_per_octave; ++j) {
      const double lambda = lo * std::exp2(static_cast<double>(j) / points_per_octave);
      if (lambda > lambda_max) {
        break;
      }
      grid.push_back(lambda);
      octave.push_back(k);
    }
  }
  if (grid.back() < lambda_max) {
    grid.push_back(lambda_max);
    octave.push_back(octave.back());
  }

  const double half_dim = 0.5 * ev.root_data().dim_n();
  // Order 1 is exact; order 2 differences the exact first derivative.
  auto f = [&](double x) { return ev.c_inverse(x); };
  auto df = [&](double x) { return ev.c_inverse_derivative(x); };
  auto derivative = [&](int order, double x) -> double {
    const double h = symbol_fd_step(x);
    switch (order) {
      case 0:
        return std::abs(f(x));
      case 1:
        return std::abs(df(x));
      default:
        return std::abs(df(x + h) - df(x - h)) / (2.0 * h);
    }
  };

  ExperimentReport report;
  report.experiment = "symbol_estimate_check";
  report.paper_ref = "c-inverse symbol class estimates";
  report.grid_meta = {{"lambda_max", lambda_max},
                      {"points_per_octave", points_per_octave},
                      {"max_order", max_order}};
  report.family = ev.is_unit_symbol() ? "unit_symbol" : "c_inverse";

  nlohmann::json orders = nlohmann::json::array();
  bool all_pass = true;
  double c0_constant = 0.0;
  double ellipticity_inf = std::numeric_limits<double>::infinity();

  for (int order = 0; order <= max_order; ++order) {
    std::vector<std::pair<int, double>> octave_sups;
    double sup = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double lambda = grid[i];
      const double d = derivative(order, lambda);
      const double scaled = d * std::pow(bracket(lambda), order - half_dim);
      if (!std::isfinite(scaled)) {
        finite = false;
        continue;
      }
      sup = std::max(sup, scaled);
      if (octave_sups.empty() || octave_sups.back().first != octave[i]) {
        octave_sups.emplace_back(octave[i], scaled);
      } else {
        octave_sups.back().second = std::max(octave_sups.back().second, scaled);
      }
      if (order == 0 && lambda >= 1.0) {
        ellipticity_inf = std::min(ellipticity_inf, d * std::pow(bracket(lambda), -half_dim));
      }
    }

    // No upward trend above 10% across the top three octaves.
    bool trend_ok = true;
    const std::size_t n_oct = octave_sups.size();
    for (std::size_t i = n_oct >= 4 ? n_oct - 3 : 1; i < n_oct; ++i) {
      const double prev = octave_sups[i - 1].second;
      const double cur = octave_sups[i].second;
      if (cur > 1.1 * prev && cur > 1e-12) {
        trend_ok = false;
      }
    }
    const bool pass = finite && trend_ok;
    all_pass = all_pass && pass;
    if (order == 0) {
      c0_constant = sup;
    }
    nlohmann::json sups = nlohmann::json::array();
    for (const auto& [k, v] : octave_sups) {
      sups.push_back({{"octave_start", k < first_octave ? 0.0 : std::ldexp(1.0, k)}, {"sup", v}});
    }
    orders.push_back({{"order", order},
                      {"constant", sup},
                      {"octave_sups", sups},
                      {"finite", finite},
                      {"no_growth", trend_ok},
                      {"pass", pass}});
  }

  const bool elliptic = ellipticity_inf > 0.0 && std::isfinite(ellipticity_inf);
  report.pass = all_pass && elliptic;
  report.lhs = c0_constant;
  report.rhs = elliptic ? ellipticity_inf : 0.0;
  report.ratio = safe_ratio(report.lhs, report.rhs);
  report.details = {{"orders", orders},
                    {"ellipticity_inf", report.rhs},
                    {"half_dim_n", half_dim}};
  return report;
}

}  // namespace hypharm
