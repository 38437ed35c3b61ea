#include <gtest/gtest.h>

#include <random>

#include "hypharm/geometry.hpp"

using namespace hypharm;

namespace {

// Disc distance from the cross-ratio form, independent of the library.
double oracle_distance(Complex x, Complex y) {
  const double num = 2.0 * std::norm(x - y);
  const double den = (1.0 - std::norm(x)) * (1.0 - std::norm(y));
  return std::acosh(1.0 + num / den);
}

MobiusMap random_isometry(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi), dist(0.0, 2.5);
  return MobiusMap::rotation(angle(rng)).compose(MobiusMap::translation(dist(rng), angle(rng)));
}

DiscPoint random_point(std::mt19937_64& rng, double r_max = 3.0) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi), r(0.0, r_max);
  return DiscPoint::from_polar(r(rng), angle(rng));
}

}  // namespace

TEST(Disc, PolarRadiusIsGeodesic) {
  for (double r : {0.0, 0.1, 1.0, 4.0, 9.0}) {
    const DiscPoint x = DiscPoint::from_polar(r, 0.7);
    EXPECT_NEAR(x.geodesic_radius(), r, 1e-12 * std::max(1.0, r));
    EXPECT_NEAR(oracle_distance(0.0, x.z()), r, 1e-9 * std::max(1.0, r));
  }
  EXPECT_THROW(DiscPoint(1.0, 0.0), DomainError);
}

TEST(Disc, DistanceMatchesOracle) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 100; ++n) {
    const DiscPoint x = random_point(rng), y = random_point(rng);
    EXPECT_NEAR(hyperbolic_distance(x, y), oracle_distance(x.z(), y.z()), 1e-9);
  }
}

TEST(Mobius, IsometriesPreserveDistance) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    const MobiusMap g = random_isometry(rng);
    const DiscPoint x = random_point(rng, 2.0), y = random_point(rng, 2.0);
    const double d = hyperbolic_distance(x, y);
    EXPECT_NEAR(hyperbolic_distance(g.apply(x), g.apply(y)), d, 1e-8 * std::max(1.0, d));
  }
}

TEST(Mobius, TranslationMovesOrigin) {
  const MobiusMap t = MobiusMap::translation(1.3, 0.4);
  EXPECT_LT(std::abs(t.apply(Complex(0.0)) - std::tanh(0.65) * std::polar(1.0, 0.4)), 1e-14);
}

TEST(Mobius, ComposeAndInverse) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 50; ++n) {
    const MobiusMap g = random_isometry(rng), h = random_isometry(rng);
    const DiscPoint x = random_point(rng, 2.0);
    EXPECT_LT(std::abs(g.compose(h).apply(x.z()) - g.apply(h.apply(x.z()))), 1e-12);
    EXPECT_LT(std::abs(g.inverse().apply(g.apply(x.z())) - x.z()), 1e-10);
  }
}

TEST(Mobius, BoundaryStaysOnBoundary) {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 50; ++n) {
    const MobiusMap g = random_isometry(rng);
    EXPECT_NEAR(std::abs(g.apply(BoundaryPoint(0.3 * n).z())), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(g.apply(Complex(std::polar(1.0, 0.3 * n)))), 1.0, 1e-12);
  }
}

TEST(Busemann, ClosedFormValues) {
  const BoundaryPoint b(1.1);
  EXPECT_EQ(busemann(DiscPoint(0.0, 0.0), b), 0.0);
  for (double s : {-3.0, -0.5, 0.0, 0.8, 5.0}) {
    EXPECT_NEAR(busemann(DiscPoint::from_polar(s, 1.1), b), s, 1e-12 * std::max(1.0, std::abs(s)));
  }
}

TEST(Busemann, LimitOfDistanceDifferences) {
  // A(x, b) = lim_{t -> inf} t - d(x, tanh(t/2) b); at t = 14 the gap is O(e^{-t}).
  std::mt19937_64 rng(17);
  const double t = 14.0;
  for (int n = 0; n < 40; ++n) {
    const DiscPoint x = random_point(rng, 1.5);
    const BoundaryPoint b(0.37 * n);
    const Complex far = std::tanh(0.5 * t) * b.z();
    EXPECT_NEAR(busemann(x, b), t - oracle_distance(x.z(), far), 5e-5);
  }
}

TEST(Busemann, CocycleProperty) {
  std::mt19937_64 rng(19);
  for (int n = 0; n < 200; ++n) {
    const MobiusMap g = random_isometry(rng);
    const DiscPoint x = random_point(rng, 2.0);
    const BoundaryPoint b(0.031 * n);
    EXPECT_LT(cocycle_check(g, x, b), 1e-9);
  }
}

TEST(Busemann, RotationInvariant) {
  const MobiusMap k = MobiusMap::rotation(2.2);
  const DiscPoint x = DiscPoint::from_polar(1.7, 0.4);
  const BoundaryPoint b(5.0);
  EXPECT_NEAR(busemann(k.apply(x), k.apply(b)), busemann(x, b), 1e-12);
}

TEST(BoundaryJacobian, IntegratesToOne) {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 10; ++n) {
    const MobiusMap g = random_isometry(rng);
    const int m = 4096;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
      sum += boundary_jacobian(g, BoundaryPoint(2.0 * kPi * k / m));
    }
    EXPECT_NEAR(sum / m, 1.0, 1e-10);
  }
}

TEST(BoundaryJacobian, MatchesAngularDerivative) {
  const MobiusMap g = MobiusMap::translation(1.2, 0.5);
  for (double beta : {0.0, 0.9, 2.5, 4.0}) {
    const double h = 1e-6;
    auto angle = [&](double a) { return std::arg(g.apply(std::polar(1.0, a))); };
    double d = angle(beta + h) - angle(beta - h);
    d = std::remainder(d, 2.0 * kPi);
    EXPECT_NEAR(boundary_jacobian(g, BoundaryPoint(beta)), d / (2.0 * h), 1e-7);
  }
}

TEST(Horocycles, PointsLieOnLevelSet) {
  const auto arc = arc_grid(6.0, 61);
  for (double h : {-2.0, 0.0, 1.5}) {
    const BoundaryPoint b(0.8);
    for (const auto& p : horocycle_points({h, b}, arc)) {
      EXPECT_NEAR(busemann(p.x, b), h, 1e-9);
    }
  }
}

TEST(Horocycles, EuclideanCircleTangentAtB) {
  // xi(H, b) is the circle through tanh(H/2) b tangent to the boundary at b.
  const double h = 0.7;
  const BoundaryPoint b(2.0);
  const double near = std::tanh(0.5 * h);
  const Complex center = 0.5 * (1.0 + near) * b.z();
  const double radius = 0.5 * (1.0 - near);
  for (const auto& p : horocycle_points({h, b}, arc_grid(5.0, 41))) {
    EXPECT_NEAR(std::abs(p.x.z() - center), radius, 1e-12);
  }
}

TEST(Horocycles, WeightsAreTrapezoid) {
  const auto arc = arc_grid(4.0, 9);
  ASSERT_EQ(arc.size(), 9u);
  EXPECT_DOUBLE_EQ(arc.front(), -4.0);
  EXPECT_DOUBLE_EQ(arc[4], 0.0);
  const auto pts = horocycle_points({0.0, BoundaryPoint(0.0)}, arc);
  double total = 0.0;
  for (const auto& p : pts) {
    total += p.weight;
  }
  EXPECT_NEAR(total, measure::kNMeasure * 8.0, 1e-14);
  EXPECT_NEAR(pts.front().weight, 0.5 * pts[1].weight, 1e-15);
  EXPECT_THROW(arc_grid(4.0, 10), std::exception);
}

TEST(Laplacian, ConstantAndCosh) {
  const PolarGrid g(3.0, 300, 32);
  const auto lap = laplace_beltrami_apply(sample_radial(g, [](double r) { return Complex(std::cosh(r)); }));
  // Delta cosh r = cosh r + coth r sinh r = 2 cosh r.
  double err = 0.0;
  for (int i = 0; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      if (lap.valid[g.index(i, j)]) {
        err = std::max(err, std::abs(lap.value.at(i, j) - 2.0 * std::cosh(g.r(i))) / std::cosh(g.r(i)));
      }
    }
  }
  EXPECT_LT(err, 1e-4);
  EXPECT_FALSE(lap.valid[g.index(0, 0)]);
  EXPECT_FALSE(lap.valid[g.index(g.n_r() - 1, 0)]);
}

TEST(Laplacian, PlaneWaveSecondOrder) {
  // e^{(i lambda + rho) A(x, b)} has eigenvalue -(lambda^2 + rho^2).
  const double lambda = 1.3;
  const BoundaryPoint b(0.0);
  auto residual = [&](int n_r) {
    const PolarGrid g(2.0, n_r, 2 * n_r);
    const auto f = [&](double r, double th) {
      return std::exp(Complex(0.5, lambda) * busemann(DiscPoint::from_polar(r, th), b));
    };
    const FunctionOnX u = sample_function(g, f);
    const auto lap = laplace_beltrami_apply(u);
    double err = 0.0;
    for (int i = 0; i < g.n_r(); ++i) {
      if (g.r(i) < 0.5 || g.r(i) > 1.5) {
        continue;
      }
      for (int j = 0; j < g.n_theta(); ++j) {
        err = std::max(err, std::abs(lap.value.at(i, j) + (lambda * lambda + 0.25) * u.at(i, j)));
      }
    }
    return err;
  };
  const double e1 = residual(32), e2 = residual(64), e3 = residual(128);
  EXPECT_GT(std::log2(e1 / e2), 1.8);
  EXPECT_GT(std::log2(e2 / e3), 1.8);
}

TEST(PolarGrid, AreaAndLayout) {
  const PolarGrid g(2.5, 200, 16);
  EXPECT_NEAR(g.total_weight(), 2.0 * kPi * (std::cosh(2.5) - 1.0), 1e-6);
  EXPECT_DOUBLE_EQ(g.r(0), g.dr());
  EXPECT_DOUBLE_EQ(g.r(g.n_r() - 1), 2.5);
  EXPECT_THROW(PolarGrid(2.5, 201, 16), GridError);
  EXPECT_THROW(PolarGrid(2.5, 200, 3), GridError);
}

TEST(PolarGrid, IntegratesRadialGaussian) {
  // int_X e^{-r^2} dx = 2 pi int_0^inf e^{-r^2} sinh r dr = pi^{3/2} e^{1/4} erf(1/2).
  const PolarGrid g(7.0, 512, 8);
  const Complex total = integrate(sample_radial(g, [](double r) { return Complex(std::exp(-r * r)); }));
  EXPECT_NEAR(total.real(), std::pow(kPi, 1.5) * std::exp(0.25) * std::erf(0.5), 1e-8);
}
