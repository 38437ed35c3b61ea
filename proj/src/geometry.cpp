#include "hypharm/geometry.hpp"

#include <cmath>

namespace hypharm {

DiscPoint::DiscPoint(double u, double v) : u_(u), v_(v) {
  if (!(u * u + v * v < 1.0)) {
    throw DomainError("DiscPoint: point must lie in the open unit disc");
  }
}

DiscPoint DiscPoint::from_polar(double r, double theta) {
  return DiscPoint(std::polar(std::tanh(0.5 * r), theta));
}

BoundaryPoint::BoundaryPoint(double beta) {
  double b = std::fmod(beta, 2.0 * kPi);
  if (b < 0.0) {
    b += 2.0 * kPi;
  }
  if (b >= 2.0 * kPi) {
    b = 0.0;
  }
  beta_ = b;
}

MobiusMap::MobiusMap(Complex a, Complex b, Complex c, Complex d) {
  const Complex det = a * d - b * c;
  if (std::abs(det) < 1e-300) {
    throw DomainError("MobiusMap: singular matrix");
  }
  const Complex scale = 1.0 / std::sqrt(det);
  a_ = a * scale;
  b_ = b * scale;
  c_ = c * scale;
  d_ = d * scale;
  if (std::abs(std::abs(a_ * d_ - b_ * c_) - 1.0) > 1e-12) {
    throw DomainError("MobiusMap: determinant modulus differs from 1");
  }
  for (int k = 0; k < 8; ++k) {
    const Complex w = apply(std::polar(1.0, 2.0 * kPi * k / 8.0 + 0.1));
    if (std::abs(std::abs(w) - 1.0) > 1e-10) {
      throw DomainError("MobiusMap: map does not preserve the unit circle");
    }
  }
}

MobiusMap MobiusMap::rotation(double phi) {
  return {std::polar(1.0, 0.5 * phi), 0.0, 0.0, std::polar(1.0, -0.5 * phi)};
}

MobiusMap MobiusMap::translation(double s, double direction) {
  const MobiusMap base(std::cosh(0.5 * s), std::sinh(0.5 * s), std::sinh(0.5 * s), std::cosh(0.5 * s));
  if (direction == 0.0) {
    return base;
  }
  return rotation(direction).compose(base).compose(rotation(-direction));
}

MobiusMap MobiusMap::compose(const MobiusMap& inner) const {
  return {a_ * inner.a_ + b_ * inner.c_, a_ * inner.b_ + b_ * inner.d_,
          c_ * inner.a_ + d_ * inner.c_, c_ * inner.b_ + d_ * inner.d_};
}

MobiusMap MobiusMap::inverse() const { return {d_, -b_, -c_, a_}; }

double hyperbolic_distance(const DiscPoint& x, const DiscPoint& y) {
  const double num = 2.0 * std::norm(x.z() - y.z());
  const double den = (1.0 - std::norm(x.z())) * (1.0 - std::norm(y.z()));
  return std::acosh(1.0 + num / den);
}

double busemann(const DiscPoint& x, const BoundaryPoint& b) {
  const double gap = std::norm(x.z() - b.z());
  if (gap < 1e-24) {
    throw DomainError("busemann: point within 1e-12 of the boundary point");
  }
  return std::log((1.0 - std::norm(x.z())) / gap);
}

double cocycle_check(const MobiusMap& g, const DiscPoint& x, const BoundaryPoint& b) {
  const BoundaryPoint gb = g.apply(b);
  const double lhs = busemann(g.apply(x), gb);
  const double rhs = busemann(x, b) + busemann(g.apply(DiscPoint{}), gb);
  return std::abs(lhs - rhs);
}

double boundary_jacobian(const MobiusMap& g, const BoundaryPoint& b, double rho) {
  return std::exp(-2.0 * rho * busemann(g.apply(DiscPoint{}), g.apply(b)));
}

std::vector<double> arc_grid(double s_max, int n) {
  if (n < 3 || n % 2 == 0 || !(s_max > 0.0)) {
    throw GridError("arc_grid: need odd n >= 3 and s_max > 0");
  }
  std::vector<double> s(static_cast<std::size_t>(n));
  const double ds = 2.0 * s_max / (n - 1);
  for (int i = 0; i < n; ++i) {
    s[static_cast<std::size_t>(i)] = -s_max + i * ds;
  }
  return s;
}

std::vector<HorocyclePoint> horocycle_points(const HorocycleCoord& xi, std::span<const double> arc_params) {
  const std::size_t n = arc_params.size();
  if (n < 2) {
    throw GridError("horocycle_points: need at least two arc parameters");
  }
  const double ds = (arc_params.back() - arc_params.front()) / static_cast<double>(n - 1);
  const double scale = std::exp(xi.h);
  const Complex rot = xi.b.z();
  std::vector<HorocyclePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex w = scale * Complex(arc_params[i], 1.0);
    const Complex z = rot * (w - kI) / (w + kI);
    const double trap = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    out.push_back({DiscPoint(z), trap * ds * measure::kNMeasure});
  }
  return out;
}

LaplacianResult laplace_beltrami_apply(const FunctionOnX& u) {
  const PolarGrid& g = u.grid;
  if (g.n_r() < 4 || g.n_theta() < 8) {
    throw GridError("laplace_beltrami_apply: need >= 4 radial and >= 8 angular nodes");
  }
  LaplacianResult out{FunctionOnX(g), std::vector<bool>(g.size(), false)};
  const double dr = g.dr();
  const double dt = g.dtheta();
  const int nt = g.n_theta();
  for (int i = 1; i + 1 < g.n_r(); ++i) {
    const double r = g.r(i);
    const double coth = 1.0 / std::tanh(r);
    const double inv_sinh2 = 1.0 / (std::sinh(r) * std::sinh(r));
    for (int j = 0; j < nt; ++j) {
      const Complex c = u.at(i, j);
      const Complex up = u.at(i + 1, j);
      const Complex dn = u.at(i - 1, j);
      const Complex left = u.at(i, (j + nt - 1) % nt);
      const Complex right = u.at(i, (j + 1) % nt);
      const Complex urr = (up - 2.0 * c + dn) / (dr * dr);
      const Complex ur = (up - dn) / (2.0 * dr);
      const Complex utt = (right - 2.0 * c + left) / (dt * dt);
      out.value.at(i, j) = urr + coth * ur + inv_sinh2 * utt;
      out.valid[g.index(i, j)] = true;
    }
  }
  return out;
}

}  // namespace hypharm
