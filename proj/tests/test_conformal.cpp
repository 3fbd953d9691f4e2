#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "calderon/analytic.hpp"
#include "calderon/conformal.hpp"
#include "calderon/error.hpp"
#include "oracles.hpp"

using namespace calderon;

namespace {

std::vector<double> chebyshev_eps(const ScalarField& u, int count) {
  double umax = 0.0;
  for (std::size_t n = 0; n < u.grid().size(); ++n) umax = std::max(umax, std::abs(u[n]));
  std::vector<double> eps;
  for (int k = 0; k < count; ++k) eps.push_back(0.5 / umax * std::cos((2 * k + 1) * M_PI / (2 * count)));
  return eps;
}

struct Tuple {
  MetricSource g;
  ScalarSource c, u, w;
};

Tuple random_tuple(int dim, std::uint64_t seed, double amplitude = 0.3) {
  std::mt19937_64 rng(seed);
  Tuple t{random_smooth_metric(dim, seed + 1000, amplitude), {}, {}, {}};
  t.c = random_trig_scalar(dim, rng, 1.0, amplitude);
  t.u = random_trig_scalar(dim, rng, 0.0, 1.0);
  t.w = random_trig_scalar(dim, rng, 0.0, 1.0);
  return t;
}

}  // namespace

TEST(Conformal, FactorMustBePositive) {
  const CylinderGrid grid(3, {4, 4});
  std::vector<double> v(grid.size(), 1.0);
  v[9] = 0.0;
  try {
    ConformalFactor(ScalarField(grid, v), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveFactor);
    EXPECT_EQ(e.node(), 9u);
  }
}

TEST(Conformal, FourthPowerScalingRefusesTwoDimensions) {
  const CylinderGrid grid(3, {4});
  const ConformalFactor c(ScalarField::constant(grid, 2.0), 2);
  try {
    scale_metric(sample_metric(flat_metric(2), grid), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedDimension);
  }
  const MetricField s = scale_metric_2d(sample_metric(flat_metric(2), grid), c);
  EXPECT_DOUBLE_EQ(s.metric(0)(1, 1), 2.0);
}

TEST(Conformal, ScaledMetricIsFourthPowerTimesMetric) {
  const CylinderGrid grid(5, {4, 4, 4});
  const Tuple t = random_tuple(4, 3);
  const MetricField g = sample_metric(t.g, grid);
  const ConformalFactor c(ScalarField::sample(t.c, grid), 4);
  const MetricField s = scale_metric(g, c);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    EXPECT_LT((s.metric(n) - std::pow(c.field()[n], 4) * g.metric(n)).cwiseAbs().maxCoeff(), 1e-13);
  }
  EXPECT_TRUE(s.has_source());
}

TEST(Conformal, AlgebraicIdentityHoldsToRoundoff) {
  const CylinderGrid grid(9, {8, 8});
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Tuple t = random_tuple(3, seed);
    EXPECT_LE(algebraic_identity_check(t.g, t.c, t.u, t.w, grid), 1e-12) << "seed " << seed;
  }
}

TEST(Conformal, AlgebraicIdentityHoldsInHigherDimensions) {
  const CylinderGrid grid(5, {4, 4, 4});
  for (std::uint64_t seed = 30; seed <= 33; ++seed) {
    const Tuple t = random_tuple(4, seed);
    EXPECT_LE(algebraic_identity_check(t.g, t.c, t.u, t.w, grid), 1e-12) << "seed " << seed;
  }
}

TEST(Conformal, UnitFactorGivesZeroPotential) {
  const CylinderGrid grid(9, {8, 8});
  const MetricField g = sample_metric(random_smooth_metric(3, 5, 0.3), grid);
  const ConformalFactor one(ScalarField::constant(grid, 1.0), 3);
  for (bool analytic : {false, true}) {
    PotentialOptions o;
    o.analytic = analytic;
    EXPECT_LT(conformal_potential(g, one, o).q.max_abs(), 1e-12);
  }
}

TEST(Conformal, AnalyticPotentialMatchesDifferenceOracle) {
  const CylinderGrid grid(5, {6, 6});
  const Tuple t = random_tuple(3, 8);
  const MetricField g = sample_metric(t.g, grid);
  const ConformalFactor c(ScalarField::sample(t.c, grid), 3);
  PotentialOptions o;
  o.analytic = true;
  const ConformalPotential q = conformal_potential(g, c, o);
  EXPECT_FALSE(q.boundary_extrapolated);
  for (std::size_t n = 0; n < grid.size(); n += 7) {
    const Point p = grid.point(n);
    if (p[0] < 0.01 || p[0] > 0.99) continue;
    const double expected = oracle::laplace_beltrami_fd(t.g, t.c.value, p) / t.c(p);
    EXPECT_NEAR(q.q[n], expected, 1e-5);
  }
}

TEST(Conformal, StencilPotentialExtrapolatesBoundaryLayers) {
  const CylinderGrid grid(9, {8, 8});
  const Tuple t = random_tuple(3, 9);
  const ConformalPotential q =
      conformal_potential(sample_metric(t.g, grid), ConformalFactor(ScalarField::sample(t.c, grid), 3));
  EXPECT_TRUE(q.boundary_extrapolated);
  const std::size_t layer = grid.layer_size();
  for (std::size_t i = 0; i < layer; ++i) EXPECT_DOUBLE_EQ(q.q[i], 2.0 * q.q[layer + i] - q.q[2 * layer + i]);
}

TEST(Conformal, ScalingLawResidualConvergesAtSecondOrder) {
  const Tuple t = random_tuple(3, 2, 0.1);
  std::vector<double> r, h;
  for (int nt : {9, 17, 33}) {
    const CylinderGrid grid(nt, {nt - 1, nt - 1});
    PotentialOptions o;
    o.analytic = true;
    r.push_back(scaling_law_residual(sample_metric(t.g, grid), ConformalFactor(ScalarField::sample(t.c, grid), 3),
                                     ScalarField::sample(t.u, grid), o));
    h.push_back(grid.spacing(0));
  }
  const double p = oracle::order(r[1], r[2], h[1], h[2]);
  EXPECT_GE(p, 1.7);
  EXPECT_LE(p, 2.3);
}

TEST(Conformal, ScalingLawWithUnitFactorIsExact) {
  const CylinderGrid grid(9, {8, 8});
  const Tuple t = random_tuple(3, 4);
  const double r = scaling_law_residual(sample_metric(t.g, grid), ConformalFactor(ScalarField::constant(grid, 1.0), 3),
                                        ScalarField::sample(t.u, grid));
  EXPECT_LE(r, 1e-10);
}

TEST(Conformal, WeakConditionVanishesForUnitFactor) {
  const CylinderGrid grid(7, {6, 6});
  const MetricField g = sample_metric(random_smooth_metric(3, 1, 0.4), grid);
  const WeakConditionResidual r = weak_condition_residual(g, ConformalFactor(ScalarField::constant(grid, 1.0), 3),
                                                          Boundary::kGamma1);
  EXPECT_LT(r.residual, 1e-12);
  EXPECT_EQ(r.boundary_defect, 0.0);
}

TEST(Conformal, WeakConditionDetectsNonHarmonicFactor) {
  const CylinderGrid grid(9, {8, 8});
  const MetricField g = sample_metric(flat_metric(3), grid);
  const ScalarSource c =
      affine(1.0, 0.3, product(t_profile(3, bump_profile(0.2, 0.8)), trig_series(3, 0.0, {{1.0, {0.0, 1.0, 0.0}, 0.0}})));
  const WeakConditionResidual r =
      weak_condition_residual(g, ConformalFactor(ScalarField::sample(c, grid), 3), Boundary::kGamma1);
  EXPECT_GT(r.interior_max, 1e-4);
  EXPECT_LT(r.boundary_defect, 1e-12);
}

TEST(Conformal, FamilyFollowsDimension) {
  const CylinderGrid grid(5, {4, 4});
  std::vector<double> u(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) u[n] = std::sin(grid.point(n)[1]);
  const ScalarField uf(grid, u);
  const ConformalFactor c3 = conformal_family(uf, 0.2, 3);
  for (std::size_t n = 0; n < grid.size(); ++n) EXPECT_DOUBLE_EQ(c3.field()[n], 1.0 + 0.2 * u[n]);
  try {
    conformal_family(uf, 0.9, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFactorTooLarge);
  }

  const CylinderGrid grid5(3, {4, 4, 4, 4});
  std::vector<double> u5(grid5.size());
  for (std::size_t n = 0; n < grid5.size(); ++n) u5[n] = std::sin(grid5.point(n)[3]);
  const ConformalFactor c5 = conformal_family(ScalarField(grid5, u5), 0.9, 5);
  for (std::size_t n = 0; n < grid5.size(); ++n) EXPECT_NEAR(std::pow(c5.field()[n], 3), 1.0 + 0.9 * u5[n], 1e-14);
}

TEST(VolumeExpansion, CoefficientsMatchBinomialQuadrature) {
  const CylinderGrid grid(9, {8, 8});
  const MetricField g = sample_metric(random_smooth_metric(3, 6, 0.3), grid);
  std::mt19937_64 rng(6);
  const ScalarField u = ScalarField::sample(random_trig_scalar(3, rng, 0.0, 1.0), grid);
  const VolumeExpansion v = volume_expansion(g, u, chebyshev_eps(u, 7));
  ASSERT_EQ(v.coefficients.size(), 7u);
  const double binom[7] = {1, 6, 15, 20, 15, 6, 1};
  for (int k = 0; k < 7; ++k) {
    const double expected =
        k == 0 ? 0.0 : binom[k] * oracle::quadrature(grid, [&](std::size_t n) { return std::pow(u[n], k) * g.sqrt_det(n); });
    EXPECT_NEAR(v.coefficients[k], expected, 1e-10 * (1.0 + std::abs(expected))) << "k = " << k;
  }
  EXPECT_NEAR(v.coefficients[2], 15.0 * v.u2_integral, 1e-10 * v.coefficients[2]);
  EXPECT_GT(v.coefficients[2], 0.0);
}

TEST(VolumeExpansion, NeedsSevenDistinctSamples) {
  const CylinderGrid grid(5, {4, 4});
  const MetricField g = sample_metric(flat_metric(3), grid);
  try {
    volume_expansion(g, ScalarField::constant(grid, 0.5), {0.1, 0.2, 0.2, 0.3, 0.4, 0.5, 0.6});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientSamples);
  }
}

TEST(Rigidity, HarmonicExtensionOfOneIsOne) {
  const CylinderGrid grid(9, {8, 8});
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    EXPECT_LE(global_rigidity_check(sample_metric(random_smooth_metric(3, seed, 0.5), grid)), 1e-10);
  }
}
