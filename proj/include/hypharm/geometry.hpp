#pragma once

#include <span>
#include <vector>

#include "hypharm/common.hpp"
#include "hypharm/grids.hpp"

namespace hypharm {

/// Point of the open unit (Poincare) disc, curvature -1 metric
/// ds = 2|dz| / (1 - |z|^2).
class DiscPoint {
 public:
  DiscPoint() = default;
  DiscPoint(double u, double v);
  explicit DiscPoint(Complex z) : DiscPoint(z.real(), z.imag()) {}

  /// Point at geodesic distance r from the origin in direction theta.
  static DiscPoint from_polar(double r, double theta);

  double u() const { return u_; }
  double v() const { return v_; }
  Complex z() const { return {u_, v_}; }
  double geodesic_radius() const { return 2.0 * std::atanh(std::abs(z())); }
  double angle() const { return std::atan2(v_, u_); }

 private:
  double u_ = 0.0;
  double v_ = 0.0;
};

/// Boundary direction b = e^{i beta}, beta normalized to [0, 2 pi).
class BoundaryPoint {
 public:
  BoundaryPoint() = default;
  explicit BoundaryPoint(double beta);

  double beta() const { return beta_; }
  Complex z() const { return std::polar(1.0, beta_); }
  BoundaryPoint antipode() const { return BoundaryPoint(beta_ + kPi); }

 private:
  double beta_ = 0.0;
};

/// Horocycle xi(H, b): signed distance H from the origin, normal b.
struct HorocycleCoord {
  double h = 0.0;
  BoundaryPoint b;
};

/// Orientation-preserving isometry of the disc, z -> (a z + b) / (c z + d),
/// stored with |det| = 1.
class MobiusMap {
 public:
  MobiusMap() = default;
  MobiusMap(Complex a, Complex b, Complex c, Complex d);

  static MobiusMap identity() { return {}; }
  static MobiusMap rotation(double phi);
  /// Hyperbolic translation by distance s along the geodesic through the
  /// origin in direction `direction`; maps o to tanh(s/2) e^{i direction}.
  static MobiusMap translation(double s, double direction = 0.0);

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }

  Complex apply(Complex z) const { return (a_ * z + b_) / (c_ * z + d_); }
  DiscPoint apply(const DiscPoint& x) const { return DiscPoint(apply(x.z())); }
  BoundaryPoint apply(const BoundaryPoint& b) const { return BoundaryPoint(std::arg(apply(b.z()))); }

  MobiusMap compose(const MobiusMap& inner) const;  // this o inner
  MobiusMap inverse() const;

 private:
  Complex a_{1.0, 0.0};
  Complex b_{0.0, 0.0};
  Complex c_{0.0, 0.0};
  Complex d_{1.0, 0.0};
};

/// Hyperbolic distance between two disc points.
double hyperbolic_distance(const DiscPoint& x, const DiscPoint& y);

/// Busemann function A(x, b) = log[(1 - |x|^2) / |x - b|^2], the signed
/// distance from the origin to the horocycle through x with normal b;
/// A(tanh(s/2) b, b) = +s. Throws DomainError when |x - b| < 1e-12.
double busemann(const DiscPoint& x, const BoundaryPoint& b);

/// |A(g x, g b) - A(x, b) - A(g o, g b)|.
double cocycle_check(const MobiusMap& g, const DiscPoint& x, const BoundaryPoint& b);

/// Radon-Nikodym factor d(g b)/db = e^{-2 rho A(g o, g b)}.
double boundary_jacobian(const MobiusMap& g, const BoundaryPoint& b, double rho = 0.5);

struct HorocyclePoint {
  DiscPoint x;
  double weight = 0.0;  // dn weight (trapezoid in the arc parameter)
};

/// Points k_b exp(H) n_s . o of the horocycle xi(H, b) for a uniform,
/// symmetric arc-parameter grid s, realized through the upper half-plane
/// (b -> infinity, n_s z = z + s, exp(H) i = e^H i), the Cayley map and a
/// rotation by b. Weights are trapezoid dn weights.
std::vector<HorocyclePoint> horocycle_points(const HorocycleCoord& xi, std::span<const double> arc_params);

/// Uniform symmetric arc grid on [-s_max, s_max] with n points (n odd).
std::vector<double> arc_grid(double s_max, int n);

/// Second-order finite-difference Laplace-Beltrami operator in geodesic polar
/// coordinates, u_rr + coth(r) u_r + sinh(r)^{-2} u_thetatheta. Nodes on the
/// innermost ring (r = dr) and the outermost ring have no centered stencil and
/// are marked invalid (value 0).
struct LaplacianResult {
  FunctionOnX value;
  std::vector<bool> valid;
};
LaplacianResult laplace_beltrami_apply(const FunctionOnX& u);

}  // namespace hypharm
