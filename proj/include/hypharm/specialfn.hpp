#pragma once

#include <functional>

#include "hypharm/common.hpp"
#include "hypharm/report.hpp"

namespace hypharm {

/// Restricted-root data of a real rank-one symmetric space, curvature -1
/// normalization: rho = (m_alpha + 2 m_2alpha) / 2, dim N = m_alpha + m_2alpha.
struct RootData {
  int m_alpha = 1;
  int m_2alpha = 0;

  double rho() const { return 0.5 * (m_alpha + 2 * m_2alpha); }
  int dim_n() const { return m_alpha + m_2alpha; }

  /// The hyperbolic plane: m_alpha = 1, m_2alpha = 0, rho = 1/2.
  static RootData hyperbolic_plane() { return {1, 0}; }
};

/// log Gamma(z) for Re z > -50, via upward recurrence to Re z >= 15 and the
/// Stirling series there. exp() of the result is Gamma(z); the imaginary part
/// is a continuous branch for Re z > 0 but need not be the principal Log.
/// Throws PoleError within 1e-12 of {0, -1, -2, ...}.
Complex log_gamma(Complex z);

/// s(xi; a, b) = Gamma(a + i xi) / Gamma(b + i xi), evaluated in log space.
Complex gamma_ratio_s(double xi, double a, double b);

struct SeriesValue {
  Complex value;
  double error_bound = 0.0;
};

/// t(xi; a, b) = i sum_{m>=0} (a-b) / ((m+a+i xi)(m+b+i xi)), so that
/// s'(xi) = s(xi) t(xi). Sums `terms` summands and closes the tail with the
/// integral log((X+a+i xi)/(X+b+i xi)), X = terms - 1/2. The returned bound
/// covers the midpoint-rule error of that tail closure.
SeriesValue gamma_ratio_t(double xi, double a, double b, int terms = 4096);

/// Harish-Chandra c-function of a rank-one space with c0 fixed so that
/// c(-i rho) = 1. A "unit symbol" evaluator (c = c^{-1} = 1) is provided for
/// checks that need a trivial multiplier.
class CFunctionEvaluator {
 public:
  explicit CFunctionEvaluator(RootData root_data = RootData::hyperbolic_plane());

  static CFunctionEvaluator unit_symbol(RootData root_data = RootData::hyperbolic_plane());

  /// Copy with an overridden normalization constant (fault injection).
  CFunctionEvaluator with_c0(Complex c0) const;

  const RootData& root_data() const { return root_data_; }
  Complex c0() const { return c0_; }
  bool is_unit_symbol() const { return unit_symbol_; }

  /// c(lambda) for complex lambda. Throws PoleError at poles of Gamma(i lambda).
  Complex c(Complex lambda) const;

  /// c^{-1}(lambda) for real lambda via the gamma-ratio product form.
  Complex c_inverse(double lambda) const;

  /// d/dlambda c^{-1}(lambda) from the gamma-ratio log-derivatives.
  Complex c_inverse_derivative(double lambda) const;
  /// |c(lambda)|^{-2} = |c^{-1}(lambda)|^2.
  double plancherel_density(double lambda) const;

 private:
  Complex unnormalized_log_c(Complex lambda, bool* is_zero) const;

  RootData root_data_;
  Complex c0_{1.0, 0.0};
  bool unit_symbol_ = false;
};

// Free-function spellings of the evaluator methods.
inline Complex c_function(Complex lambda, const CFunctionEvaluator& ev) { return ev.c(lambda); }
inline Complex c_inverse(double lambda, const CFunctionEvaluator& ev) { return ev.c_inverse(lambda); }
inline double plancherel_density(double lambda, const CFunctionEvaluator& ev) {
  return ev.plancherel_density(lambda);
}

/// Central finite-difference step used by the symbol sweeps.
inline double symbol_fd_step(double lambda) { return std::max(1e-4, 1e-6 * bracket(lambda)); }

/// Empirical symbol constants C_alpha = sup |d^alpha c^{-1}| <lambda>^{alpha - dimN/2}
/// on a dyadic lambda grid over [0, lambda_max], for alpha = 0..max_order (at
/// most 2).
/// Passes when the per-octave sups of the top three octaves show no upward
/// trend above 10% and the order-0 ellipticity infimum over [1, lambda_max]
/// is positive.
ExperimentReport symbol_estimate_check(const CFunctionEvaluator& ev, int max_order,
                                       double lambda_max, int points_per_octave = 64);

}  // namespace hypharm
