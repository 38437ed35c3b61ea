#include <gtest/gtest.h>

#include "hypharm/estimates.hpp"
#include "oracles.hpp"

using namespace hypharm;

TEST(Smoothstep, EndpointsAndSymmetry) {
  EXPECT_EQ(smoothstep7(0.0), 0.0);
  EXPECT_EQ(smoothstep7(1.0), 1.0);
  EXPECT_EQ(smoothstep7(-3.0), 0.0);
  EXPECT_EQ(smoothstep7(4.0), 1.0);
  for (double x = 0.0; x <= 1.0; x += 0.05) {
    EXPECT_NEAR(smoothstep7(x) + smoothstep7(1.0 - x), 1.0, 1e-14);
  }
  // Three vanishing derivatives at each end.
  const double h = 1e-3;
  EXPECT_LT(smoothstep7(h), 1e-10);
  EXPECT_LT(1.0 - smoothstep7(1.0 - h), 1e-10);
}

TEST(Smoothstep, Cutoff) {
  EXPECT_EQ(chi_cutoff(0.5, 1.0, 2.0), 0.0);
  EXPECT_EQ(chi_cutoff(-0.9, 1.0, 2.0), 0.0);
  EXPECT_EQ(chi_cutoff(2.5, 1.0, 2.0), 1.0);
  EXPECT_EQ(chi_cutoff(-2.5, 1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(chi_cutoff(1.5, 1.0, 2.0), 0.5);
}

TEST(SmoothingConfigTest, Validation) {
  SmoothingConfig c;
  EXPECT_NO_THROW(c.validate());
  c.delta = 0.5;
  EXPECT_THROW(c.validate(), DomainError);
  c.delta = 0.3;
  EXPECT_THROW(c.validate(), DomainError);
  c = SmoothingConfig{};
  c.chi_outer = 0.5;
  EXPECT_THROW(c.validate(), DomainError);
  c = SmoothingConfig{};
  c.n_t = 7;
  EXPECT_THROW(c.validate(), DomainError);
  c = SmoothingConfig{};
  c.family_size = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Families, ShippedMembersAreNormalized) {
  const PolarGrid g(3.2, 128, 64);
  const auto all = shipped_families(g, 7);
  EXPECT_EQ(all.size(), 28u);
  for (const auto& m : all) {
    EXPECT_NEAR(l2_norm(m.u), 1.0, 1e-12) << m.family << " " << m.index;
  }
  EXPECT_EQ(shipped_family_names().size(), 4u);
  EXPECT_THROW(make_family("nope", g, 3), DomainError);
}

TEST(Families, RadialBumpSupport) {
  const PolarGrid g(3.2, 128, 16);
  for (const auto& m : make_family("radial_bump", g, 3)) {
    const double radius = 1.2 + 0.2 * m.index;
    for (int i = 0; i < g.n_r(); ++i) {
      if (g.r(i) >= radius) {
        EXPECT_EQ(m.u.at(i, 0), Complex(0.0));
      }
    }
  }
}

TEST(Families, RandomMixIsSeeded) {
  const PolarGrid g(3.2, 64, 32);
  const auto a = random_mix_family(g, 3, 42);
  const auto b = random_mix_family(g, 3, 42);
  const auto c = random_mix_family(g, 3, 43);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t m = 0; m < a.size(); ++m) {
    EXPECT_EQ(a[m].u.values, b[m].u.values);
    EXPECT_NE(a[m].u.values, c[m].u.values);
    EXPECT_NEAR(l2_norm(a[m].u), 1.0, 1e-12);
  }
}

TEST(Corollary, SchrodingerMultipliers) {
  const auto [p, q] = corollary_multipliers(schrodinger_multiplier());
  for (double l : {0.1, 1.0, 9.0}) {
    EXPECT_NEAR(p(l), std::sqrt(2.0 * l), 1e-14);
    EXPECT_NEAR(q(l), 2.0 * l, 1e-14);
  }
  Multiplier bare{"bare", [](double l) { return l; }, nullptr};
  EXPECT_THROW(corollary_multipliers(bare), DomainError);
}

TEST(Smoothing1D, StaticFlowIsWeightedNorm) {
  // a = 0, p = 1: LHS^2 = 2T ||<x>^{-delta} psi||^2.
  const State1D psi = gaussian_1d(0.7, 1.5, 4.0);
  const TimeGrid time(1.5, 16);
  const double delta = 0.8;
  double weighted = 0.0, plain = 0.0;
  for (int i = 0; i < psi.grid.n; ++i) {
    const double x = psi.grid.x(i);
    weighted += std::pow(1.0 + x * x, -delta) * std::norm(psi.values[i]);
    plain += std::norm(psi.values[i]);
  }
  const double expected = std::sqrt(3.0 * weighted / plain);
  const double ratio = smoothing_ratio_1d(constant_multiplier(0.0), constant_multiplier(1.0), delta, psi, time);
  EXPECT_NEAR(ratio / expected, 1.0, 1e-10);
}

TEST(Smoothing1D, KatoRatioBoundedAcrossFrequencies) {
  // p = |2 xi|^{1/2}: the ratio stays bounded as the data move to high frequency.
  const auto [p, q] = corollary_multipliers(free_schrodinger_1d());
  const TimeGrid time(4.0, 256);
  std::vector<State1D> family;
  for (double f : {0.0, 2.0, 4.0, 8.0}) {
    family.push_back(gaussian_1d(0.5, f, 2.0 * 4.0 * (f + 24.0)));
  }
  const EstimateResult r = kato_baseline_1d(free_schrodinger_1d(), p, 0.6, family, time);
  ASSERT_EQ(r.grid_meta["ratios"].size(), 4u);
  for (const auto& v : r.grid_meta["ratios"]) {
    EXPECT_TRUE(std::isfinite(v.get<double>()));
    EXPECT_LE(v.get<double>(), r.ratio);
  }
  EXPECT_LT(r.ratio, 3.0);
}

TEST(Gain1D, GaussianMatchesClosedFormEvolution) {
  const double delta = 0.6, t_max = 2.0;
  const State1D phi = gaussian_1d(1.0, 0.0, 40.0);
  const ExperimentReport r = gain_regularity_1d(phi, 1, delta, TimeGrid(t_max, 128));
  const double ref = oracle::gain_ratio_gaussian(1.0, 1, delta, t_max);
  EXPECT_NEAR(r.ratio / ref, 1.0, 1e-4) << r.ratio << " vs " << ref;
}

TEST(Gain1D, RejectsSmallDelta) {
  const State1D phi = gaussian_1d(1.0, 0.0, 4.0);
  EXPECT_THROW(gain_regularity_1d(phi, 1, 0.5, TimeGrid(1.0, 8)), DomainError);
  EXPECT_THROW(gain_regularity_1d(phi, -1, 0.6, TimeGrid(1.0, 8)), DomainError);
}

TEST(Stability, RelativeChange) {
  const StabilityInfo s = refinement_stability(2.0, 2.3);
  EXPECT_DOUBLE_EQ(s.refined_ratio, 2.3);
  EXPECT_NEAR(s.delta_pct, 15.0, 1e-12);
  EXPECT_TRUE(is_stable(s));
  EXPECT_FALSE(is_stable(refinement_stability(2.0, 1.5)));
  EXPECT_FALSE(is_stable(s, 10.0));
}

namespace {

class SmallSmoothing : public ::testing::Test {
 protected:
  static PolarGrid pg() { return PolarGrid(3.2, 128, 64); }
  static SpectralGrid sg() { return SpectralGrid(24.0, 256, 64); }
  static SmoothingConfig cfg() {
    SmoothingConfig c;
    c.n_t = 64;
    c.time_horizon = 2.0;
    return c;
  }
  const CFunctionEvaluator ev_;
};

}  // namespace

TEST_F(SmallSmoothing, StaticFlowMatchesWeightedNorm) {
  // a = 0, p = 1: LHS = (2T)^{1/2} ||<H>^{-delta} T u||.
  const auto family = make_family("gaussian", pg(), 2);
  const auto images = family_images(family, sg());
  const auto res = smoothing_homogeneous(constant_multiplier(0.0), constant_multiplier(1.0), family, images, cfg(), ev_);
  ASSERT_EQ(res.size(), 2u);
  for (std::size_t m = 0; m < res.size(); ++m) {
    const double wn = weighted_norm(images[m], -cfg().delta, ev_).norm;
    EXPECT_NEAR(res[m].lhs_norm / (std::sqrt(2.0 * cfg().time_horizon) * wn), 1.0, 1e-10);
    // The right side is the Plancherel norm of a unit vector.
    EXPECT_NEAR(res[m].rhs_norm, 1.0, 5e-3);
  }
}

TEST_F(SmallSmoothing, ImageOverloadsAgree) {
  const auto family = make_family("off_center", pg(), 2);
  const auto [p, q] = corollary_multipliers(schrodinger_multiplier());
  const auto slow = smoothing_homogeneous(schrodinger_multiplier(), p, family, cfg(), sg(), ev_);
  const auto fast = smoothing_homogeneous(schrodinger_multiplier(), p, family, family_images(family, sg()), cfg(), ev_);
  for (std::size_t m = 0; m < slow.size(); ++m) {
    EXPECT_EQ(slow[m].ratio, fast[m].ratio);
    EXPECT_TRUE(std::isfinite(fast[m].ratio));
    EXPECT_EQ(fast[m].time_profile.size(), static_cast<std::size_t>(cfg().n_t + 1));
  }
}

TEST_F(SmallSmoothing, InhomogeneousRatiosFinite) {
  const auto family = make_family("gaussian", pg(), 2);
  const auto data = separable_data(family);
  const auto [p, q] = corollary_multipliers(schrodinger_multiplier());
  const auto res = smoothing_inhomogeneous(schrodinger_multiplier(), q, data, datum_images(data, sg()), cfg(), ev_);
  ASSERT_EQ(res.size(), 2u);
  for (const auto& r : res) {
    EXPECT_TRUE(std::isfinite(r.ratio));
    EXPECT_GT(r.ratio, 0.0);
  }
}

TEST_F(SmallSmoothing, RejectsMismatchedImages) {
  const auto family = make_family("gaussian", pg(), 2);
  const auto images = family_images(make_family("gaussian", pg(), 1), sg());
  EXPECT_THROW(smoothing_homogeneous(schrodinger_multiplier(), constant_multiplier(1.0), family, images, cfg(), ev_),
               GridError);
}

TEST_F(SmallSmoothing, DecayConditionNormArcs) {
  const auto family = make_family("off_center", pg(), 3);
  const FourierImage image = helgason_forward_both(family[2].u, sg());
  const double full = decay_condition_norm(image, 1, 0.0, 2.0 * kPi, ev_);
  const double half1 = decay_condition_norm(image, 1, 0.0, kPi, ev_);
  const double half2 = decay_condition_norm(image, 1, kPi, 2.0 * kPi, ev_);
  EXPECT_LE(half1, full * (1.0 + 1e-12));
  EXPECT_LE(half2, full * (1.0 + 1e-12));
  EXPECT_NEAR(decay_condition_norm(image, 0, 0.0, 2.0 * kPi, ev_), weighted_norm(image, 0.0, ev_).norm, 1e-10);
}

TEST(GainX, MatchesTransferredOneDimensional) {
  const PolarGrid g(3.2, 128, 64);
  const FunctionOnX phi = normalized(sample_radial(g, [](double r) { return Complex(std::exp(-std::pow(r / 0.6, 2))); }));
  const SpectralGrid sg(24.0, 256, 64);
  const ExperimentReport r = gain_regularity_X(phi, 1, 0.6, TimeGrid(2.0, 64), sg, CFunctionEvaluator());
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_NEAR(r.ratio / r.details["ratio_1d"].get<double>(), 1.0, 1e-2);
}

TEST(GridMeta, RecordsGrids) {
  const auto m = grid_meta(PolarGrid(3.0, 64, 32), SpectralGrid(10.0, 40, 32), TimeGrid(2.0, 8));
  EXPECT_EQ(m["n_r"].get<int>(), 64);
  EXPECT_EQ(m["n_lambda"].get<int>(), 40);
}
