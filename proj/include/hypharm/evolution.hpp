#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hypharm/common.hpp"
#include "hypharm/grids.hpp"
#include "hypharm/specialfn.hpp"
#include "hypharm/transforms.hpp"

namespace hypharm {

/// Real spectral symbol a(lambda), evaluated at |lambda| so that both chambers
/// see the same value. `derivative` is a'(lambda) for lambda > 0 (optional).
/// Growth: |a(lambda)| <= growth_constant * <lambda>^growth_order.
struct Multiplier {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double growth_constant = 1.0;
  double growth_order = 0.0;

  double operator()(double lambda) const { return value(std::abs(lambda)); }
  double prime(double lambda) const;
  bool has_derivative() const { return static_cast<bool>(derivative); }
};

/// a = lambda^2 + rho^2, the symbol of -Delta_X.
Multiplier schrodinger_multiplier(double rho = 0.5);
/// a = sum_k c_k (lambda^2 + rho^2)^k.
Multiplier polynomial_multiplier(std::vector<double> coefficients, double rho = 0.5);
/// a = lambda^m.
Multiplier homogeneous_multiplier(double m);
Multiplier constant_multiplier(double c);
/// a = xi^2, the free Schroedinger symbol on the line (same as
/// homogeneous_multiplier(2)).
Multiplier free_schrodinger_1d();

/// Parses "schrodinger", "poly:c0,c1,...", "homogeneous:m" or "const:c".
/// Throws DomainError on anything else.
Multiplier parse_multiplier(const std::string& spec);

/// Checks realness (finite values) and the declared growth bound on the grid.
bool multiplier_growth_ok(const Multiplier& a, const std::vector<double>& lambdas);

/// Uniform symmetric time grid t_i = -T + i dt, i = 0..n_intervals (even, so
/// that t = 0 is a node). T = 0 with n_intervals = 0 gives the single time 0.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double t_max, int n_intervals);

  double t_max() const { return t_max_; }
  int n_intervals() const { return n_; }
  int n_points() const { return n_ + 1; }
  int zero_index() const { return n_ / 2; }
  double dt() const { return n_ == 0 ? 0.0 : 2.0 * t_max_ / n_; }
  double t(int i) const { return -t_max_ + i * dt(); }
  /// Composite Simpson weight of node i including dt (0 for the single-point grid).
  double weight(int i) const;

 private:
  double t_max_ = 0.0;
  int n_ = 0;
};

/// Frequency-side state at a given time.
struct EvolutionState {
  double time = 0.0;
  FourierImage snapshot;
};

/// e^{i t a(lambda)} on both chambers.
EvolutionState propagate(const Multiplier& a, double t, const FourierImage& u0);
EvolutionState propagate(const Multiplier& a, double t, const EvolutionState& state);
EvolutionState propagate(const Multiplier& a, double t, const FunctionOnX& u0, const SpectralGrid& grid,
                         Warnings* warnings = nullptr);

/// Physical samples of a state (inversion over the positive chamber).
FunctionOnX materialize(const EvolutionState& state, const PolarGrid& grid, const CFunctionEvaluator& ev,
                        Warnings* warnings = nullptr);

/// Plancherel norm of a state (positive chamber).
double state_norm(const FourierImage& image, const CFunctionEvaluator& ev);

/// Multiplies both chambers by symbol(signed lambda).
FourierImage apply_symbol(const FourierImage& image, const std::function<Complex(double)>& symbol);

/// a(D_x) u = inverse(a * forward(u)). Warns when a F u has not decayed below
/// 1e-6 of its maximum at lambda_max.
FunctionOnX multiplier_apply(const Multiplier& a, const FunctionOnX& u, const SpectralGrid& grid,
                             const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

/// Duhamel term G f(t) = int_0^t e^{i(t - tau) a} f(tau) dtau at grid time
/// index `t_index`, for f sampled (as Fourier images) at every node of the
/// time grid. Composite Simpson from 0 to t, closed with a 3/8 panel when the
/// interval count is odd (trapezoid for a single interval). Warns when
/// dt * a(lambda_max) exceeds pi/4.
FourierImage duhamel(const Multiplier& a, const std::vector<FourierImage>& f, int t_index, const TimeGrid& time,
                     Warnings* warnings = nullptr);
FunctionOnX duhamel(const Multiplier& a, const std::vector<FunctionOnX>& f, int t_index, const TimeGrid& time,
                    const SpectralGrid& grid, const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

/// Duhamel term for separable data f(tau) = theta(tau) g:
/// G f(t) = K(t, lambda) g with K(t, lambda) = int_0^t e^{i(t - tau) a(lambda)} theta(tau) dtau.
/// K is integrated per lambda on a sub-grid fine enough that
/// a(lambda) dtau <= pi/8, then sampled at the time-grid nodes.
class SeparableDuhamel {
 public:
  /// Kernel on the midpoint lambda grid of `grid`.
  SeparableDuhamel(const Multiplier& a, const std::function<Complex(double)>& theta, const SpectralGrid& grid,
                   const TimeGrid& time);
  /// Kernel at arbitrary nonnegative frequencies (index = position in `lambdas`).
  SeparableDuhamel(const Multiplier& a, const std::function<Complex(double)>& theta,
                   const std::vector<double>& lambdas, const TimeGrid& time);

  int n_lambda() const { return n_lambda_; }
  /// K(t_i, lambdas[j]).
  Complex kernel(int t_index, int lambda_index) const {
    return kernel_[static_cast<std::size_t>(t_index) * n_lambda_ + lambda_index];
  }
  /// K(t_i, |signed_lambda|) looked up on the midpoint grid (first constructor only).
  Complex kernel_at(int t_index, double signed_lambda) const;
  FourierImage state(int t_index, const FourierImage& g) const;

 private:
  void build(const Multiplier& a, const std::function<Complex(double)>& theta, const std::vector<double>& lambdas,
             const TimeGrid& time);

  double midpoint_dlambda_ = 0.0;
  int n_lambda_ = 0;
  std::vector<Complex> kernel_;
};

/// Uniform 1D grid x_i = x_min + i dx, i = 0..n-1.
struct Grid1D {
  double x_min = 0.0;
  double dx = 1.0;
  int n = 0;
  double x(int i) const { return x_min + i * dx; }
  /// Centered grid with n points (n even) and spacing dx; x = 0 is node n/2.
  static Grid1D centered(int n, double dx) { return {-0.5 * n * dx, dx, n}; }
};

struct State1D {
  Grid1D grid;
  std::vector<Complex> values;
};

/// 1D Fourier multiplier symbol(xi) applied by zero-padded DFT (padding factor
/// >= 1, result restricted to the input window). Warns when |psi^| at the
/// Nyquist frequency exceeds 1e-6 of its maximum.
State1D fourier_multiplier_1d(const std::function<Complex(double)>& symbol, const State1D& psi, int padding = 2,
                              Warnings* warnings = nullptr);
/// e^{i t a(xi)} psi; a evaluated at |xi|.
State1D euclid_propagate_1d(const Multiplier& a, double t, const State1D& psi, int padding = 2,
                            Warnings* warnings = nullptr);
double l2_norm(const State1D& psi);

/// Zero-pads psi symmetrically to next_pow2(factor * n) points on a grid
/// with the same spacing and the same center.
State1D zero_pad_centered(const State1D& psi, int factor);

/// DFT of a state computed once, for repeated multiplier application on the
/// state's own periodic grid.
class SpectralState1D {
 public:
  explicit SpectralState1D(const State1D& psi);

  const Grid1D& grid() const { return grid_; }
  /// Angular frequency of bin q (signed).
  double frequency(int q) const;
  /// Nonnegative frequencies |xi_q| for q = 0..n/2; bin q maps to entry |signed_bin(q)|.
  std::vector<double> abs_frequencies() const;
  int abs_index(int q) const;
  /// Maximum of |psi^| at the Nyquist bin relative to the spectral maximum.
  double nyquist_fraction() const;

  std::vector<Complex> apply(const std::function<Complex(double)>& symbol) const;
  /// symbol_by_abs_index[abs_index(q)] multiplies bin q.
  std::vector<Complex> apply_indexed(const std::vector<Complex>& symbol_by_abs_index) const;

 private:
  Grid1D grid_;
  std::vector<Complex> spectrum_;
};

/// Horocycle window for the intertwining checks: |H| up to 0.9 pi / dlambda
/// (inside half the period of the midpoint lambda sum) with spacing below
/// pi / (1.05 lambda_max).
HorocycleGrid intertwine_grid(const SpectralGrid& grid);

/// max over s = +-1 of
///   ||T_s(p(D_x) e^{i t a(D_x)} u0) - p(s D_H) e^{i t a(s D_H)} (T_s u0)|| / ||u0||
/// on the horocycle grid (GridError if the window exceeds half the period
/// 2 pi / dlambda of the lambda sum); the left side is a direct lambda sum of the
/// propagated state, the right side a 1D DFT propagation of T_s u0.
double intertwine_homogeneous_check(const Multiplier& a, const Multiplier& p, const FourierImage& u0, double t,
                                    const HorocycleGrid& grid, const CFunctionEvaluator& ev,
                                    Warnings* warnings = nullptr);

/// ||T(e^{-i t Delta_X} u0) - e^{i t rho^2} e^{-i t Delta_a}(T u0)|| / ||u0||.
double schrodinger_intertwine_check(const FourierImage& u0, double t, const HorocycleGrid& grid,
                                    const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

}  // namespace hypharm
