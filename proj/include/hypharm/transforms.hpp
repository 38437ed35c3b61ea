#pragma once

#include <functional>
#include <vector>

#include "hypharm/common.hpp"
#include "hypharm/grids.hpp"
#include "hypharm/report.hpp"
#include "hypharm/specialfn.hpp"

namespace hypharm {

/// log P(r, d) where P = (1 - |x|^2) / |x - b|^2 for x at geodesic radius r and
/// angular offset d from b; equals -log(e^{-r} + 2 sinh(r) sin^2(d/2)).
double log_poisson(double r, double angle_offset);

/// Helgason Fourier transform F u(lambda, b) on one chamber by polar-grid
/// quadrature. The b-dependence is a circular correlation with the angular
/// samples, so the grid requires n_b == n_theta. Warns on support leakage
/// (outer two rings above 1e-8 max|u|).
SpectralTable helgason_forward(const FunctionOnX& u, const SpectralGrid& grid, int chamber = +1,
                               Warnings* warnings = nullptr);

/// Both chambers from a single kernel pass.
FourierImage helgason_forward_both(const FunctionOnX& u, const SpectralGrid& grid,
                                   Warnings* warnings = nullptr);

/// Both chambers for several functions on the same polar grid; kernels are
/// computed once and shared.
std::vector<FourierImage> helgason_forward_batch(const std::vector<FunctionOnX>& functions,
                                                 const SpectralGrid& grid, Warnings* warnings = nullptr);

/// Direct (slow) quadrature of F u at a single (lambda, beta).
Complex helgason_forward_at(const FunctionOnX& u, double lambda, double beta);

/// Inversion integral over the table's chamber with weights
/// |c(lambda)|^{-2} dlambda db. Warns when the table has not decayed below
/// 1e-8 of its maximum at the last lambda.
FunctionOnX helgason_inverse(const SpectralTable& table, const PolarGrid& grid,
                             const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

/// Plancherel norm (int |F|^2 |c|^{-2} dlambda db)^{1/2} of one chamber.
double plancherel_norm(const SpectralTable& table, const CFunctionEvaluator& ev);

/// Elementary spherical function phi_lambda(r) = int_B P^{rho + i lambda} db,
/// adaptive Gauss-Kronrod with breakpoints clustered at the peak b = x/|x|.
Complex spherical_function(double lambda, double r);

struct RadonOptions {
  double s_max = 30.0;  // arc-parameter truncation
  int n_s = 513;        // odd number of arc samples per horocycle
};

/// Horocycle Radon transform R u(H, b) = int u(k_b exp(H) n_s . o) dn. The
/// integrand is evaluated by angular Fourier interpolation (exact rotation to
/// every b through one inverse DFT) and cubic interpolation in r. Requires
/// n_b == n_theta. Warns if the arc truncation cuts a non-negligible integrand.
HorocycleFunction radon_forward(const FunctionOnX& u, const HorocycleGrid& grid,
                                const RadonOptions& options = {}, Warnings* warnings = nullptr);

/// Fourier image recovered from Radon data on the slice side:
/// int e^{(rho - i lambda) H} R u(H, b) dH for every (lambda, b) of `grid`
/// (trapezoid in H, spectrally accurate for data that vanish at both ends;
/// the boundary angles of both grids must coincide).
SpectralTable radon_to_fourier(const HorocycleFunction& radon, const SpectralGrid& grid, int chamber = +1);

/// ||radon_to_fourier(R u) - helgason_forward(u)|| / ||helgason_forward(u)|| over the table.
double projection_slice_residual(const FunctionOnX& u, const HorocycleGrid& horocycles, const SpectralGrid& grid,
                                 const RadonOptions& options = {}, Warnings* warnings = nullptr);

/// |<R u, phi>_Xi - <u, R* phi>_X| / |<u, R* phi>_X| (bilinear pairings,
/// d xi = e^{2 rho H} dH db).
double adjointness_residual(const FunctionOnX& u, const HorocycleFunction& phi, const RadonOptions& options = {},
                            Warnings* warnings = nullptr);

/// Dual transform R* phi(x) = int_B e^{2 rho A(x,b)} phi(A(x,b), b) db, linear
/// interpolation of phi in H. Nodes with A outside the H range read 0 and
/// trigger a coverage warning.
FunctionOnX dual_radon(const HorocycleFunction& phi, const PolarGrid& grid, Warnings* warnings = nullptr);

/// Lambda phi = e^{-rho H} m(D_H) e^{rho H} phi with m = c^{-1}, or
/// conj(c^{-1}) when `conjugate` is set, applied per b by zero-padded DFT.
/// If e^{rho H} phi has not decayed below 1e-6 of its maximum at the ends,
/// a cosine taper is applied to the outer tenth and a warning is recorded.
HorocycleFunction lambda_op(const HorocycleFunction& phi, bool conjugate, const CFunctionEvaluator& ev,
                            Warnings* warnings = nullptr);

/// conj(Lambda) Lambda phi in one spectral pass with the multiplier |c^{-1}|^2.
/// Equal to lambda_op(lambda_op(phi, false), true) without truncating the
/// intermediate, which does not decay as H -> -inf.
HorocycleFunction lambda_bar_lambda(const HorocycleFunction& phi, const CFunctionEvaluator& ev,
                                    Warnings* warnings = nullptr);

/// u = w^{-1} R* conj(Lambda) Lambda R u with w = 2, evaluated on u's grid.
FunctionOnX radon_inverse(const FunctionOnX& u, const HorocycleGrid& horocycles,
                          const CFunctionEvaluator& ev, const RadonOptions& options = {},
                          Warnings* warnings = nullptr);

enum class Chamber { positive, negative, both };

/// T_s u(H, b) = int_{s a*_+} e^{i lambda H} F u(lambda, b) c^{-1}(lambda) dlambda
/// by direct midpoint summation at the nodes of `grid`; Chamber::both gives
/// T = T_+ + T_-.
HorocycleFunction isometry_T(const FourierImage& image, const HorocycleGrid& grid, Chamber chamber,
                             const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

/// T on the DFT-matched horocycle grid H_p = (p - n) dH, p = 0..2n-1, with
/// dH = pi / lambda_max (n = n_lambda). The midpoint lambda sum is periodic
/// up to sign with period 2 pi / dlambda, so this grid carries the whole sum.
struct PeriodicHorocycleFunction {
  double dh = 0.0;
  int n_h = 0;  // number of H samples (2 n_lambda)
  int n_b = 0;
  std::vector<Complex> values;  // index p * n_b + k

  double h(int p) const { return (p - n_h / 2) * dh; }
  Complex& at(int p, int k) { return values[static_cast<std::size_t>(p) * n_b + k]; }
  const Complex& at(int p, int k) const { return values[static_cast<std::size_t>(p) * n_b + k]; }
};

/// Symbol applied on the spectral side before the lambda sum, evaluated at the
/// signed lambda.
using SpectralSymbol = std::function<Complex(double)>;

/// Reusable form of isometry_T_periodic: c^{-1} and the output twiddles are
/// computed once per spectral grid.
class PeriodicTransfer {
 public:
  PeriodicTransfer(const SpectralGrid& grid, const CFunctionEvaluator& ev);

  const SpectralGrid& grid() const { return grid_; }
  PeriodicHorocycleFunction apply(const FourierImage& image, Chamber chamber,
                                  const SpectralSymbol& symbol = nullptr) const;
  /// Symbol given per lambda index for each chamber (n_lambda entries each).
  PeriodicHorocycleFunction apply(const FourierImage& image, Chamber chamber,
                                  const std::vector<Complex>& symbol_positive,
                                  const std::vector<Complex>& symbol_negative) const;

  /// The image with the c^{-1} factors applied, stored per b (n_b columns of
  /// 2 n_lambda), for repeated weighted norms under changing symbols.
  struct Columns {
    int n_h = 0;
    int n_b = 0;
    std::vector<Complex> values;
  };
  Columns columns(const FourierImage& image, Chamber chamber) const;
  /// sum over (p, k) of weight[p] |apply(image, chamber, symbols)(p, k)|^2,
  /// without materializing the horocycle function.
  double weighted_sum_sq(const Columns& columns, const std::vector<Complex>& symbol_positive,
                         const std::vector<Complex>& symbol_negative, const std::vector<double>& weight) const;

 private:
  SpectralGrid grid_;
  std::vector<Complex> c_pos_;
  std::vector<Complex> c_neg_;
  std::vector<Complex> post_;
};

PeriodicHorocycleFunction isometry_T_periodic(const FourierImage& image, Chamber chamber,
                                              const CFunctionEvaluator& ev,
                                              const SpectralSymbol& symbol = nullptr);

struct WeightedNormResult {
  double norm = 0.0;
  double tail_fraction = 0.0;  // share of norm^2 from |H| > 0.8 of the half period
  bool divergent = false;      // delta > 0 and tail_fraction > 1%
};

/// ||<H>^delta f||_{L^2(a x B, w^{-1} dH db)} on the periodic grid.
WeightedNormResult weighted_norm_periodic(const PeriodicHorocycleFunction& f, double delta);

/// L^{2,delta}(X) norm ||<H>^delta T u||, computed from the Fourier image.
WeightedNormResult weighted_norm(const FourierImage& image, double delta, const CFunctionEvaluator& ev,
                                 Warnings* warnings = nullptr);
WeightedNormResult weighted_norm(const FunctionOnX& u, const SpectralGrid& grid, double delta,
                                 const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

/// ||f||_{L^2(a x B, w^{-1} dH db)} with Simpson in H.
double horocycle_isometry_norm(const HorocycleFunction& f);

/// int_Xi f g dxi with dxi = e^{2 rho H} dH db (bilinear).
Complex horocycle_pairing(const HorocycleFunction& f, const HorocycleFunction& g);

/// Ratios ||u||_{L^{2,2k}} / ||u|| and ||chi u|| / ||u||_{L^{2,2k}} (chi the
/// indicator of B(o, support_radius)) over a family of functions supported in
/// that ball. Passes when both maxima are finite, the second is <= 1.005 and no
/// weighted norm diverges.
ExperimentReport compact_support_embedding_check(const std::vector<FunctionOnX>& family, int k,
                                                 double support_radius, const SpectralGrid& grid,
                                                 const CFunctionEvaluator& ev);

}  // namespace hypharm
