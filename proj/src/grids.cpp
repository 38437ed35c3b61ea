#include "hypharm/grids.hpp"

#include <cmath>
#include <string>

namespace hypharm {

std::vector<double> simpson_coefficients(int n_intervals) {
  if (n_intervals < 2 || n_intervals % 2 != 0) {
    throw GridError("Simpson rule needs an even, positive number of intervals");
  }
  std::vector<double> c(static_cast<std::size_t>(n_intervals) + 1);
  for (int i = 0; i <= n_intervals; ++i) {
    c[static_cast<std::size_t>(i)] = (i == 0 || i == n_intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    c[static_cast<std::size_t>(i)] /= 3.0;
  }
  return c;
}

PolarGrid::PolarGrid(double r_max, int n_r, int n_theta)
    : r_max_(r_max), n_r_(n_r), n_theta_(n_theta) {
  if (!(r_max > 0.0) || n_r < 2 || n_r % 2 != 0 || n_theta < 4 || n_theta % 2 != 0) {
    throw GridError("PolarGrid: need r_max > 0, even n_r >= 2 and even n_theta >= 4 (got n_r=" +
                    std::to_string(n_r) + ", n_theta=" + std::to_string(n_theta) + ")");
  }
  const double dr = r_max / n_r;
  const auto simpson = simpson_coefficients(n_r);
  r_values_.resize(static_cast<std::size_t>(n_r));
  radial_weights_.resize(static_cast<std::size_t>(n_r));
  for (int i = 0; i < n_r; ++i) {
    const double r = (i + 1) * dr;
    r_values_[static_cast<std::size_t>(i)] = r;
    radial_weights_[static_cast<std::size_t>(i)] = simpson[static_cast<std::size_t>(i) + 1] * dr * std::sinh(r);
  }
  theta_values_.resize(static_cast<std::size_t>(n_theta));
  for (int j = 0; j < n_theta; ++j) {
    theta_values_[static_cast<std::size_t>(j)] = 2.0 * kPi * j / n_theta;
  }
}

double PolarGrid::total_weight() const {
  double s = 0.0;
  for (double w : radial_weights_) {
    s += w;
  }
  return s * 2.0 * kPi;
}

FunctionOnX::FunctionOnX(PolarGrid g, std::vector<Complex> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw GridError("FunctionOnX: value count does not match the grid");
  }
}

FunctionOnX sample_function(const PolarGrid& grid, const std::function<Complex(double, double)>& f) {
  FunctionOnX u(grid);
  for (int i = 0; i < grid.n_r(); ++i) {
    for (int j = 0; j < grid.n_theta(); ++j) {
      u.at(i, j) = f(grid.r(i), grid.theta(j));
    }
  }
  return u;
}

FunctionOnX sample_radial(const PolarGrid& grid, const std::function<Complex(double)>& f) {
  FunctionOnX u(grid);
  for (int i = 0; i < grid.n_r(); ++i) {
    const Complex v = f(grid.r(i));
    for (int j = 0; j < grid.n_theta(); ++j) {
      u.at(i, j) = v;
    }
  }
  return u;
}

namespace {
void require_same_grid(const FunctionOnX& a, const FunctionOnX& b) {
  if (!(a.grid == b.grid)) {
    throw GridError("FunctionOnX: operands live on different grids");
  }
}
}  // namespace

double l2_norm(const FunctionOnX& u) {
  double s = 0.0;
  for (std::size_t n = 0; n < u.values.size(); ++n) {
    s += u.grid.weight(n) * std::norm(u.values[n]);
  }
  return std::sqrt(s);
}

double l2_distance(const FunctionOnX& u, const FunctionOnX& v) {
  require_same_grid(u, v);
  double s = 0.0;
  for (std::size_t n = 0; n < u.values.size(); ++n) {
    s += u.grid.weight(n) * std::norm(u.values[n] - v.values[n]);
  }
  return std::sqrt(s);
}

Complex integrate_product(const FunctionOnX& u, const FunctionOnX& v) {
  require_same_grid(u, v);
  Complex s = 0.0;
  for (std::size_t n = 0; n < u.values.size(); ++n) {
    s += u.grid.weight(n) * u.values[n] * v.values[n];
  }
  return s;
}

Complex integrate(const FunctionOnX& u) {
  Complex s = 0.0;
  for (std::size_t n = 0; n < u.values.size(); ++n) {
    s += u.grid.weight(n) * u.values[n];
  }
  return s;
}

FunctionOnX operator+(const FunctionOnX& a, const FunctionOnX& b) {
  require_same_grid(a, b);
  FunctionOnX out = a;
  for (std::size_t n = 0; n < out.values.size(); ++n) {
    out.values[n] += b.values[n];
  }
  return out;
}

FunctionOnX operator-(const FunctionOnX& a, const FunctionOnX& b) {
  require_same_grid(a, b);
  FunctionOnX out = a;
  for (std::size_t n = 0; n < out.values.size(); ++n) {
    out.values[n] -= b.values[n];
  }
  return out;
}

FunctionOnX operator*(Complex s, const FunctionOnX& a) {
  FunctionOnX out = a;
  for (auto& v : out.values) {
    v *= s;
  }
  return out;
}

SpectralGrid::SpectralGrid(double lambda_max, int n_lambda, int n_b)
    : lambda_max_(lambda_max), n_lambda_(n_lambda), n_b_(n_b) {
  if (!(lambda_max > 0.0) || n_lambda < 1 || n_b < 1) {
    throw GridError("SpectralGrid: need lambda_max > 0, n_lambda >= 1, n_b >= 1");
  }
}

std::vector<double> SpectralGrid::lambda_values() const {
  std::vector<double> v(static_cast<std::size_t>(n_lambda_));
  for (int j = 0; j < n_lambda_; ++j) {
    v[static_cast<std::size_t>(j)] = lambda(j);
  }
  return v;
}

std::vector<double> SpectralGrid::b_values() const {
  std::vector<double> v(static_cast<std::size_t>(n_b_));
  for (int k = 0; k < n_b_; ++k) {
    v[static_cast<std::size_t>(k)] = b(k);
  }
  return v;
}

SpectralTable::SpectralTable(SpectralGrid g, int chamber_sign)
    : grid(g), chamber(chamber_sign), values(g.size(), Complex{}) {
  if (chamber_sign != 1 && chamber_sign != -1) {
    throw DomainError("SpectralTable: chamber must be +1 or -1");
  }
}

HorocycleGrid::HorocycleGrid(double h_max, int n_h, int n_b) : h_max_(h_max), n_h_(n_h), n_b_(n_b) {
  if (!(h_max > 0.0) || n_h < 2 || n_h % 2 != 0 || n_b < 1) {
    throw GridError("HorocycleGrid: need h_max > 0, even n_h >= 2, n_b >= 1");
  }
}

std::vector<double> HorocycleGrid::h_values() const {
  std::vector<double> v(static_cast<std::size_t>(n_points()));
  for (int i = 0; i < n_points(); ++i) {
    v[static_cast<std::size_t>(i)] = h(i);
  }
  return v;
}

std::vector<double> HorocycleGrid::b_values() const {
  std::vector<double> v(static_cast<std::size_t>(n_b_));
  for (int k = 0; k < n_b_; ++k) {
    v[static_cast<std::size_t>(k)] = b(k);
  }
  return v;
}

double HorocycleGrid::simpson_weight(int i) const {
  if (i == 0 || i == n_h_) {
    return 1.0 / 3.0;
  }
  return i % 2 == 1 ? 4.0 / 3.0 : 2.0 / 3.0;
}

}  // namespace hypharm
