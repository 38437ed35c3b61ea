#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hypharm/common.hpp"

namespace hypharm {

/// Geodesic-polar grid on the Poincare disc. Radii r_i = i * dr (i = 1..n_r,
/// n_r even) and angles theta_j = 2 pi j / n_theta. Quadrature weights are
/// composite Simpson in r (the r = 0 node carries zero weight because of the
/// sinh r factor) times the periodic trapezoid in theta, so that
/// sum(weights) approximates the area 2 pi (cosh R_max - 1).
class PolarGrid {
 public:
  PolarGrid() = default;
  PolarGrid(double r_max, int n_r, int n_theta);

  double r_max() const { return r_max_; }
  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  std::size_t size() const { return static_cast<std::size_t>(n_r_) * n_theta_; }
  double dr() const { return r_max_ / n_r_; }
  double dtheta() const { return 2.0 * kPi / n_theta_; }

  double r(int i) const { return r_values_[static_cast<std::size_t>(i)]; }
  double theta(int j) const { return theta_values_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& r_values() const { return r_values_; }
  const std::vector<double>& theta_values() const { return theta_values_; }

  /// Radial Simpson weight including sinh r (without the dtheta factor).
  double radial_weight(int i) const { return radial_weights_[static_cast<std::size_t>(i)]; }
  double weight(std::size_t node) const { return radial_weight(static_cast<int>(node / n_theta_)) * dtheta(); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_theta_ + j; }

  double total_weight() const;

  bool operator==(const PolarGrid& other) const {
    return r_max_ == other.r_max_ && n_r_ == other.n_r_ && n_theta_ == other.n_theta_;
  }

 private:
  double r_max_ = 0.0;
  int n_r_ = 0;
  int n_theta_ = 0;
  std::vector<double> r_values_;
  std::vector<double> theta_values_;
  std::vector<double> radial_weights_;
};

/// Complex samples of a function on X at the nodes of a PolarGrid.
struct FunctionOnX {
  PolarGrid grid;
  std::vector<Complex> values;

  FunctionOnX() = default;
  explicit FunctionOnX(PolarGrid g) : grid(std::move(g)), values(grid.size(), Complex{}) {}
  FunctionOnX(PolarGrid g, std::vector<Complex> v);

  Complex& at(int i, int j) { return values[grid.index(i, j)]; }
  const Complex& at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Samples f(r, theta) at every node.
FunctionOnX sample_function(const PolarGrid& grid, const std::function<Complex(double, double)>& f);
FunctionOnX sample_radial(const PolarGrid& grid, const std::function<Complex(double)>& f);

/// L^2(X, dx) norm with the grid quadrature.
double l2_norm(const FunctionOnX& u);
/// L^2 distance ||u - v|| (same grid required).
double l2_distance(const FunctionOnX& u, const FunctionOnX& v);
/// <u, v> = integral of u * v dx (bilinear, no conjugation).
Complex integrate_product(const FunctionOnX& u, const FunctionOnX& v);
Complex integrate(const FunctionOnX& u);

FunctionOnX operator+(const FunctionOnX& a, const FunctionOnX& b);
FunctionOnX operator-(const FunctionOnX& a, const FunctionOnX& b);
FunctionOnX operator*(Complex s, const FunctionOnX& a);

/// Spectral-side grid: midpoints lambda_j = (j + 1/2) * Lambda_max / n_lambda
/// in the open chamber and boundary angles b_k = 2 pi k / n_b.
class SpectralGrid {
 public:
  SpectralGrid() = default;
  SpectralGrid(double lambda_max, int n_lambda, int n_b);

  double lambda_max() const { return lambda_max_; }
  int n_lambda() const { return n_lambda_; }
  int n_b() const { return n_b_; }
  double dlambda() const { return lambda_max_ / n_lambda_; }
  double lambda(int j) const { return (j + 0.5) * dlambda(); }
  double b(int k) const { return 2.0 * kPi * k / n_b_; }
  std::size_t size() const { return static_cast<std::size_t>(n_lambda_) * n_b_; }
  std::size_t index(int j, int k) const { return static_cast<std::size_t>(j) * n_b_ + k; }
  std::vector<double> lambda_values() const;
  std::vector<double> b_values() const;

  bool operator==(const SpectralGrid& other) const {
    return lambda_max_ == other.lambda_max_ && n_lambda_ == other.n_lambda_ && n_b_ == other.n_b_;
  }

 private:
  double lambda_max_ = 0.0;
  int n_lambda_ = 0;
  int n_b_ = 0;
};

/// Sampled Helgason Fourier image on one Weyl chamber: values(j, k) =
/// F u(chamber * lambda_j, b_k), chamber = +1 or -1.
struct SpectralTable {
  SpectralGrid grid;
  int chamber = +1;
  std::vector<Complex> values;

  SpectralTable() = default;
  SpectralTable(SpectralGrid g, int chamber_sign);

  Complex& at(int j, int k) { return values[grid.index(j, k)]; }
  const Complex& at(int j, int k) const { return values[grid.index(j, k)]; }
  double signed_lambda(int j) const { return chamber * grid.lambda(j); }
};

/// Both chambers of a Fourier image; the negative chamber is needed by the
/// isometry T and everything built on it.
struct FourierImage {
  SpectralTable positive;
  SpectralTable negative;
};

/// Horocycle-side grid: H_i = -H_max + i dH (i = 0..n_h, dH = 2 H_max / n_h,
/// n_h even so that H = 0 is a node) and b_k = 2 pi k / n_b.
class HorocycleGrid {
 public:
  HorocycleGrid() = default;
  HorocycleGrid(double h_max, int n_h, int n_b);

  double h_max() const { return h_max_; }
  int n_h() const { return n_h_; }
  int n_points() const { return n_h_ + 1; }
  int n_b() const { return n_b_; }
  double dh() const { return 2.0 * h_max_ / n_h_; }
  double h(int i) const { return -h_max_ + i * dh(); }
  double b(int k) const { return 2.0 * kPi * k / n_b_; }
  std::size_t size() const { return static_cast<std::size_t>(n_points()) * n_b_; }
  std::size_t index(int i, int k) const { return static_cast<std::size_t>(i) * n_b_ + k; }
  std::vector<double> h_values() const;
  std::vector<double> b_values() const;

  /// Composite Simpson weight of node i (in units of dH).
  double simpson_weight(int i) const;

  bool operator==(const HorocycleGrid& other) const {
    return h_max_ == other.h_max_ && n_h_ == other.n_h_ && n_b_ == other.n_b_;
  }

 private:
  double h_max_ = 0.0;
  int n_h_ = 0;
  int n_b_ = 0;
};

/// Samples on the horocycle space Xi = a x B.
struct HorocycleFunction {
  HorocycleGrid grid;
  std::vector<Complex> values;

  HorocycleFunction() = default;
  explicit HorocycleFunction(HorocycleGrid g) : grid(g), values(grid.size(), Complex{}) {}

  Complex& at(int i, int k) { return values[grid.index(i, k)]; }
  const Complex& at(int i, int k) const { return values[grid.index(i, k)]; }
};

/// Composite Simpson coefficients (1,4,2,...,4,1)/3 for n_intervals (even).
std::vector<double> simpson_coefficients(int n_intervals);

}  // namespace hypharm
