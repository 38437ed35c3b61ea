#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hypharm/common.hpp"
#include "hypharm/evolution.hpp"
#include "hypharm/grids.hpp"
#include "hypharm/report.hpp"
#include "hypharm/specialfn.hpp"
#include "hypharm/transforms.hpp"

namespace hypharm {

struct SmoothingConfig {
  double delta = 0.6;
  double chi_inner = 1.0;
  double chi_outer = 2.0;
  double time_horizon = 4.0;
  int n_t = 256;  // time intervals on [-T, T] (even)
  int family_size = 7;

  /// Throws DomainError ("δ must exceed 1/2", chi ordering, counts).
  void validate() const;
  TimeGrid time_grid() const { return TimeGrid(time_horizon, n_t); }
};

struct EstimateResult {
  std::string family_id;
  int member = 0;
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  double ratio = 0.0;
  nlohmann::json grid_meta = nlohmann::json::object();
  /// Integrand of the squared time integral at each node of the time grid.
  std::vector<double> time_profile;
  Warnings warnings;
};

/// Degree-7 smoothstep x^4 (35 - 84 x + 70 x^2 - 20 x^3), clamped to [0, 1].
double smoothstep7(double x);
/// 0 for |lambda| <= inner, 1 for |lambda| >= outer, smoothstep7 between.
double chi_cutoff(double lambda, double inner, double outer);

struct FamilyMember {
  std::string family;
  int index = 0;
  FunctionOnX u;  // unit L^2 norm
};

/// Named test families on X, each member normalized to ||u|| = 1:
///   gaussian     exp(-(r / w_j)^2), w_j = 0.5 * 2^{-j/6}
///   modulated    exp(-(r / 0.4)^2) e^{i kappa_j A(x, b0)}, kappa_j = 2^{j/2}, b0 = 0
///   radial_bump  exp(-1 / (1 - (r / R_j)^2)), R_j = 1.2 + 0.2 j
///   off_center   exp(-(d(x, x_j) / 0.3)^2), x_j at distance 0.15 j on the real axis
/// Throws DomainError for an unknown name.
std::vector<FamilyMember> make_family(const std::string& name, const PolarGrid& grid, int size);
const std::vector<std::string>& shipped_family_names();
std::vector<FamilyMember> shipped_families(const PolarGrid& grid, int size);

/// Sums of three off-center Gaussians with random centers (distance < 0.6),
/// widths and complex amplitudes drawn from mt19937_64(seed); the same seed
/// gives bit-identical members.
std::vector<FamilyMember> random_mix_family(const PolarGrid& grid, int size, std::uint64_t seed);

FunctionOnX normalized(const FunctionOnX& u);

/// LHS = (int_{-T}^{T} ||<H>^{-delta} T(p e^{i t a} u0)||^2 dt)^{1/2}, RHS = ||u0||.
std::vector<EstimateResult> smoothing_homogeneous(const Multiplier& a, const Multiplier& p,
                                                  const std::vector<FamilyMember>& family,
                                                  const SmoothingConfig& cfg, const SpectralGrid& grid,
                                                  const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

/// Same, with the Helgason images of the members precomputed (one per member,
/// all on one spectral grid).
std::vector<EstimateResult> smoothing_homogeneous(const Multiplier& a, const Multiplier& p,
                                                  const std::vector<FamilyMember>& family,
                                                  const std::vector<FourierImage>& images,
                                                  const SmoothingConfig& cfg, const CFunctionEvaluator& ev,
                                                  Warnings* warnings = nullptr);

/// Helgason images of every member, in one batch.
std::vector<FourierImage> family_images(const std::vector<FamilyMember>& family, const SpectralGrid& grid,
                                        Warnings* warnings = nullptr);

/// Separable forcing f(tau, x) = theta(tau) g(x).
struct InhomogeneousDatum {
  std::string family;
  int index = 0;
  std::function<Complex(double)> theta;
  FunctionOnX g;
};

/// theta(tau) = e^{-tau^2} attached to every member of a family.
std::vector<InhomogeneousDatum> separable_data(const std::vector<FamilyMember>& family);

/// LHS = ||chi q G f||_{L^2((-T,T); L^{2,-delta})} with G the Duhamel term,
/// RHS = ||f||_{L^2((-T,T); L^{2,delta})} = ||theta||_{L^2(-T,T)} ||<H>^delta T g||.
std::vector<EstimateResult> smoothing_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                    const std::vector<InhomogeneousDatum>& data,
                                                    const SmoothingConfig& cfg, const SpectralGrid& grid,
                                                    const CFunctionEvaluator& ev, Warnings* warnings = nullptr);

std::vector<EstimateResult> smoothing_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                    const std::vector<InhomogeneousDatum>& data,
                                                    const std::vector<FourierImage>& images,
                                                    const SmoothingConfig& cfg, const CFunctionEvaluator& ev,
                                                    Warnings* warnings = nullptr);

/// Helgason images of every forcing profile g, in one batch.
std::vector<FourierImage> datum_images(const std::vector<InhomogeneousDatum>& data, const SpectralGrid& grid,
                                       Warnings* warnings = nullptr);

/// p = |a'|^{1/2}, q = a'. Throws DomainError when a has no derivative.
std::pair<Multiplier, Multiplier> corollary_multipliers(const Multiplier& a);

/// ||<x>^{-delta} p(D) e^{i t a(D)} psi||_{L^2((-T,T) x R)} / ||psi|| on psi's
/// grid zero-padded by `padding`.
double smoothing_ratio_1d(const Multiplier& a, const Multiplier& p, double delta, const State1D& psi,
                          const TimeGrid& time, int padding = 4, Warnings* warnings = nullptr);

/// Gaussian exp(-(x / width)^2) e^{i frequency x} sampled with spacing
/// width / 8 on a window wide enough for its spectrum to travel at most
/// `reach` away.
State1D gaussian_1d(double width, double frequency, double reach);

/// Supremum of smoothing_ratio_1d over a family; lhs_norm/rhs_norm of the
/// extremal member are reported, per-member ratios go to grid_meta["ratios"].
EstimateResult kato_baseline_1d(const Multiplier& a, const Multiplier& p, double delta,
                                const std::vector<State1D>& family, const TimeGrid& time,
                                Warnings* warnings = nullptr);

/// Transfer of the homogeneous estimate: for every member, LHS_X is compared
/// with w^{1/2} C ||u0|| where C is the largest 1D ratio over the slices
/// T_s u0(., b); passes when LHS_X <= 1.05 w^{1/2} C ||u0|| for every member.
ExperimentReport transfer_comparison(const Multiplier& a, const Multiplier& p,
                                     const std::vector<FamilyMember>& family, const SmoothingConfig& cfg,
                                     const SpectralGrid& grid, const CFunctionEvaluator& ev);

ExperimentReport transfer_comparison(const Multiplier& a, const Multiplier& p,
                                     const std::vector<FamilyMember>& family,
                                     const std::vector<FourierImage>& images, const SmoothingConfig& cfg,
                                     const CFunctionEvaluator& ev);

/// Same for the Duhamel term; the X-side right-hand side is taken per chamber,
/// ||theta|| (sum_s ||<H>^delta T_s g||^2)^{1/2}.
ExperimentReport transfer_comparison_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                   const std::vector<InhomogeneousDatum>& data,
                                                   const SmoothingConfig& cfg, const SpectralGrid& grid,
                                                   const CFunctionEvaluator& ev);
ExperimentReport transfer_comparison_inhomogeneous(const Multiplier& a, const Multiplier& q,
                                                   const std::vector<InhomogeneousDatum>& data,
                                                   const std::vector<FourierImage>& images,
                                                   const SmoothingConfig& cfg, const CFunctionEvaluator& ev);

/// ||t^k <x>^{-k-delta} <D>^{k+1/2} e^{i t D^2} phi||_{L^2((-T,T) x R)} / ||<x>^k phi||
/// and the continuous variant max_t ||t^k <x>^{-k} <D>^k e^{i t D^2} phi|| / ||<x>^k phi||
/// (details["continuous_ratio"]).
ExperimentReport gain_regularity_1d(const State1D& phi, int k, double delta, const TimeGrid& time,
                                    int padding = 4, Warnings* warnings = nullptr);

/// The same norms on X with <D_x> = <lambda> and the weights taken on the
/// horocycle side; details carry the ratio recomputed from the transferred 1D
/// data T phi (ratio_1d) and their relative difference.
ExperimentReport gain_regularity_X(const FunctionOnX& phi, int k, double delta, const TimeGrid& time,
                                   const SpectralGrid& grid, const CFunctionEvaluator& ev,
                                   Warnings* warnings = nullptr);

/// ||<H>^k T phi|| restricted to boundary angles b in [arc_start, arc_end]
/// (radians, taken mod 2 pi; arc_end - arc_start >= 2 pi means the full circle).
double decay_condition_norm(const FourierImage& image, int k, double arc_start, double arc_end,
                            const CFunctionEvaluator& ev);
double decay_condition_norm(const FunctionOnX& phi, int k, double arc_start, double arc_end,
                            const SpectralGrid& grid, const CFunctionEvaluator& ev);

/// Relative change of a refined ratio; stable when |delta_pct| <= tolerance_pct.
StabilityInfo refinement_stability(double base_ratio, double refined_ratio);
bool is_stable(const StabilityInfo& info, double tolerance_pct = 20.0);

nlohmann::json grid_meta(const PolarGrid& polar, const SpectralGrid& spectral, const TimeGrid& time);

}  // namespace hypharm
