#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "hypharm/transforms.hpp"

using namespace hypharm;

namespace {

// phi_lambda(r) = (1/pi) int_0^pi (cosh r + sinh r cos t)^{-1/2 + i lambda} dt.
Complex laplace_integral(double lambda, double r) {
  auto integrand = [&](double t, bool imag) {
    const double base = std::cosh(r) + std::sinh(r) * std::cos(t);
    const Complex v = std::pow(base, Complex(-0.5, lambda));
    return imag ? v.imag() : v.real();
  };
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 61>::integrate([&](double t) { return integrand(t, false); }, 0.0, kPi, 10,
                                                         1e-12);
  const double im = gauss_kronrod<double, 61>::integrate([&](double t) { return integrand(t, true); }, 0.0, kPi, 10,
                                                         1e-12);
  return Complex(re, im) / kPi;
}

Complex test_bump(double r, double th) {
  const double x = std::tanh(r / 2) * std::cos(th);
  const double y = std::tanh(r / 2) * std::sin(th);
  return std::exp(-2.0 * r * r) * (1.0 + 0.6 * x + 2.0 * x * y);
}

double rel_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    num += std::norm(a[q] - b[q]);
    den += std::norm(b[q]);
  }
  return std::sqrt(num / den);
}

class Transforms : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    u_ = new FunctionOnX(sample_function(pg(), test_bump));
    image_ = new FourierImage(helgason_forward_both(*u_, sg()));
  }
  static void TearDownTestSuite() {
    delete u_;
    delete image_;
  }
  static PolarGrid pg() { return PolarGrid(3.2, 256, 128); }
  static SpectralGrid sg() { return SpectralGrid(24.0, 256, 128); }
  static HorocycleGrid hg() { return HorocycleGrid(10.0, 256, 128); }

  static FunctionOnX* u_;
  static FourierImage* image_;
  const CFunctionEvaluator ev_;
};

FunctionOnX* Transforms::u_ = nullptr;
FourierImage* Transforms::image_ = nullptr;

}  // namespace

TEST(LogPoisson, ClosedForm) {
  for (double r : {0.0, 0.3, 2.0, 8.0}) {
    for (double d : {0.0, 0.5, 3.0}) {
      const Complex x = std::tanh(r / 2) * std::polar(1.0, d);
      const double direct = std::log((1.0 - std::norm(x)) / std::norm(x - 1.0));
      EXPECT_NEAR(log_poisson(r, d), direct, 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(SphericalFunction, ExactlyOneAtOrigin) {
  for (double l : {0.0, 0.4, 5.0, 80.0}) {
    EXPECT_EQ(spherical_function(l, 0.0), Complex(1.0));
  }
}

TEST(SphericalFunction, MatchesLaplaceIntegral) {
  for (double l : {0.0, 0.5, 3.0, 10.0}) {
    for (double r : {0.1, 1.0, 3.0, 6.0}) {
      const Complex ref = laplace_integral(l, r);
      EXPECT_LT(std::abs(spherical_function(l, r) - ref), 1e-9 * std::max(1e-3, std::abs(ref))) << l << " " << r;
    }
  }
}

TEST(SphericalFunction, EvenInLambdaAndReal) {
  for (double l : {0.2, 1.7, 12.0}) {
    for (double r : {0.5, 2.0, 9.0}) {
      const Complex p = spherical_function(l, r);
      EXPECT_LT(std::abs(p - spherical_function(-l, r)), 1e-10);
      EXPECT_LT(std::abs(p.imag()), 1e-10);
    }
  }
}

TEST(SphericalFunction, GroundStateBracket) {
  // e^{-r/2} <= phi_0(r) <= C e^{-r/2} (1 + r) with C = 1 on the hyperbolic plane.
  for (double r = 0.0; r <= 20.0; r += 0.25) {
    const double p = spherical_function(0.0, r).real();
    EXPECT_GE(p, std::exp(-0.5 * r) * (1.0 - 1e-12)) << r;
    EXPECT_LE(p, std::exp(-0.5 * r) * (1.0 + r)) << r;
  }
}

TEST(SphericalFunction, RadialEigenfunction) {
  // phi'' + coth(r) phi' = -(lambda^2 + 1/4) phi; central differences converge at second order.
  const double lambda = 2.0, r = 1.3;
  auto residual = [&](double h) {
    const Complex p = spherical_function(lambda, r);
    const Complex pp = spherical_function(lambda, r + h), pm = spherical_function(lambda, r - h);
    const Complex lap = (pp - 2.0 * p + pm) / (h * h) + (pp - pm) / (2.0 * h * std::tanh(r));
    return std::abs(lap + (lambda * lambda + 0.25) * p);
  };
  const double e1 = residual(0.04), e2 = residual(0.02);
  EXPECT_GT(std::log2(e1 / e2), 1.8);
  EXPECT_LT(e2, 1e-3);
}

TEST_F(Transforms, DirectQuadratureMatchesTable) {
  for (int j : {0, 17, 90}) {
    for (int k : {0, 5, 40}) {
      const Complex direct = helgason_forward_at(*u_, sg().lambda(j), sg().b(k));
      EXPECT_LT(std::abs(image_->positive.at(j, k) - direct), 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_F(Transforms, RadialFunctionHasSphericalTransform) {
  // For radial u, F u(lambda, b) = 2 pi int u(r) phi_lambda(r) sinh r dr.
  const PolarGrid g(5.0, 256, 256);
  const auto f = [](double r) { return std::exp(-r * r); };
  const FourierImage img = helgason_forward_both(sample_radial(g, [&](double r) { return Complex(f(r)); }),
                                                 SpectralGrid(8.0, 8, 256));
  for (int j : {0, 3, 7}) {
    const double l = img.positive.grid.lambda(j);
    using boost::math::quadrature::gauss;
    const double ref = 2.0 * kPi * gauss<double, 40>::integrate(
                                       [&](double r) { return f(r) * spherical_function(l, r).real() * std::sinh(r); },
                                       0.0, 6.0);
    for (int k = 0; k < 256; k += 51) {
      EXPECT_LT(std::abs(img.positive.at(j, k) - ref), 1e-6) << l;
      EXPECT_LT(std::abs(img.negative.at(j, k) - ref), 1e-6) << l;
    }
  }
}

TEST_F(Transforms, Plancherel) {
  const double norm = l2_norm(*u_);
  EXPECT_LT(std::abs(plancherel_norm(image_->positive, ev_) / norm - 1.0), 5e-3);
  EXPECT_LT(std::abs(plancherel_norm(image_->negative, ev_) / norm - 1.0), 5e-3);
}

TEST_F(Transforms, HelgasonRoundTrip) {
  Warnings w;
  const FunctionOnX back = helgason_inverse(image_->positive, pg(), ev_, &w);
  EXPECT_LT(l2_distance(back, *u_) / l2_norm(*u_), 1e-3);
}

TEST_F(Transforms, RadonRoundTrip) {
  const FunctionOnX back = radon_inverse(*u_, hg(), ev_);
  EXPECT_LT(l2_distance(back, *u_) / l2_norm(*u_), 1e-2);
}

TEST_F(Transforms, ProjectionSlice) {
  const HorocycleFunction ru = radon_forward(*u_, hg());
  EXPECT_LT(rel_distance(radon_to_fourier(ru, sg(), +1).values, image_->positive.values), 1e-3);
  EXPECT_LT(rel_distance(radon_to_fourier(ru, sg(), -1).values, image_->negative.values), 1e-3);
}

TEST_F(Transforms, RadonOfRadialIsIndependentOfB) {
  const FunctionOnX v = sample_radial(pg(), [](double r) { return Complex(std::exp(-2.0 * r * r)); });
  const HorocycleFunction rv = radon_forward(v, hg());
  for (int i = 0; i < hg().n_points(); i += 7) {
    for (int k = 1; k < hg().n_b(); ++k) {
      EXPECT_LT(std::abs(rv.at(i, k) - rv.at(i, 0)), 1e-9);
    }
  }
}

TEST_F(Transforms, DualRadonOfConstantIsOne) {
  HorocycleFunction one(hg());
  std::fill(one.values.begin(), one.values.end(), Complex(1.0));
  Warnings w;
  const FunctionOnX d = dual_radon(one, pg(), &w);
  EXPECT_TRUE(w.empty());
  // The b-integrand peaks with width e^{-r}; the trapezoid rule is exact to
  // round-off only while that is resolved.
  for (int i = 0; i < pg().n_r(); i += 5) {
    for (int j = 0; j < pg().n_theta(); j += 13) {
      EXPECT_LT(std::abs(d.at(i, j) - 1.0), pg().r(i) < 1.5 ? 1e-10 : 1e-4) << pg().r(i);
    }
  }
}

TEST_F(Transforms, Adjointness) {
  HorocycleFunction phi(hg());
  for (int i = 0; i < hg().n_points(); ++i) {
    for (int k = 0; k < hg().n_b(); ++k) {
      phi.at(i, k) = std::exp(-hg().h(i) * hg().h(i)) * (1.0 + 0.5 * std::sin(hg().b(k)));
    }
  }
  EXPECT_LT(adjointness_residual(*u_, phi), 1e-3);
}

TEST_F(Transforms, IsometryAndRadonFactorization) {
  const HorocycleFunction tu = isometry_T(*image_, hg(), Chamber::both, ev_);
  EXPECT_LT(std::abs(horocycle_isometry_norm(tu) / l2_norm(*u_) - 1.0), 5e-3);
  const HorocycleFunction lr = lambda_op(radon_forward(*u_, hg()), false, ev_);
  double diff = 0.0, ref = 0.0;
  for (int i = 0; i < hg().n_points(); ++i) {
    for (int k = 0; k < hg().n_b(); ++k) {
      diff = std::max(diff, std::abs(std::exp(0.5 * hg().h(i)) * lr.at(i, k) - tu.at(i, k)));
      ref = std::max(ref, std::abs(tu.at(i, k)));
    }
  }
  EXPECT_LT(diff / ref, 1e-3);
}

TEST_F(Transforms, PeriodicTransferAgreesWithDirectSum) {
  const PeriodicHorocycleFunction p = isometry_T_periodic(*image_, Chamber::both, ev_);
  EXPECT_EQ(p.n_h, 2 * sg().n_lambda());
  const int n = sg().n_lambda();
  // Nodes of the periodic grid inside [-10, 10] share the H values p dH.
  const HorocycleGrid direct_grid(n * p.dh / 2.0, n, sg().n_b());
  const HorocycleFunction d = isometry_T(*image_, direct_grid, Chamber::both, ev_);
  for (int i = 0; i <= n; i += 5) {
    const int q = i + n / 2;
    for (int k = 0; k < sg().n_b(); k += 9) {
      EXPECT_LT(std::abs(p.at(q, k) - d.at(i, k)), 1e-10 * std::max(1.0, std::abs(d.at(i, k))));
    }
  }
}

TEST_F(Transforms, WeightedNormAtZeroIsL2Norm) {
  const WeightedNormResult w0 = weighted_norm(*image_, 0.0, ev_);
  EXPECT_LT(std::abs(w0.norm / l2_norm(*u_) - 1.0), 5e-3);
  EXPECT_FALSE(w0.divergent);
  const WeightedNormResult w1 = weighted_norm(*image_, 1.0, ev_);
  EXPECT_GT(w1.norm, w0.norm);
}

TEST_F(Transforms, ColumnNormMatchesApply) {
  const PeriodicTransfer transfer(sg(), ev_);
  const int n = sg().n_lambda();
  std::vector<Complex> pos(n), neg(n);
  for (int j = 0; j < n; ++j) {
    pos[j] = std::exp(Complex(0.0, 0.3 * sg().lambda(j)));
    neg[j] = std::conj(pos[j]);
  }
  const PeriodicHorocycleFunction f = transfer.apply(*image_, Chamber::both, pos, neg);
  std::vector<double> weight(f.n_h);
  double direct = 0.0;
  for (int p = 0; p < f.n_h; ++p) {
    weight[p] = 1.0 + f.h(p) * f.h(p);
    for (int k = 0; k < f.n_b; ++k) {
      direct += weight[p] * std::norm(f.at(p, k));
    }
  }
  const double fused = transfer.weighted_sum_sq(transfer.columns(*image_, Chamber::both), pos, neg, weight);
  EXPECT_NEAR(fused / direct, 1.0, 1e-12);
}

TEST(TransformErrors, MismatchedAngularGrids) {
  const FunctionOnX u = sample_function(PolarGrid(2.0, 32, 16), test_bump);
  EXPECT_THROW(helgason_forward_both(u, SpectralGrid(4.0, 8, 32)), GridError);
  EXPECT_THROW(radon_forward(u, HorocycleGrid(4.0, 16, 32)), GridError);
}
