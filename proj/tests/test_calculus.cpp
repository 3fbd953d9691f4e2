#include <gtest/gtest.h>

#include <random>

#include "calderon/analytic.hpp"
#include "calderon/calculus.hpp"
#include "calderon/error.hpp"
#include "oracles.hpp"

using namespace calderon;

namespace {

ScalarSource random_function(int dim, std::uint64_t seed, double offset = 0.0) {
  std::mt19937_64 rng(seed);
  return random_trig_scalar(dim, rng, offset, 1.0);
}

}  // namespace

TEST(Calculus, AnalyticGradientIsUsedWhenSourceIsAttached) {
  const CylinderGrid grid(5, {6, 6});
  const ScalarSource f = random_function(3, 1);
  const CovectorField df = gradient(ScalarField::sample(f, grid));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    EXPECT_LT((df[n] - f.gradient(grid.point(n))).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Calculus, DifferenceGradientIsExactForQuadraticsInT) {
  const CylinderGrid grid(6, {4});
  std::vector<double> v(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double t = grid.point(n)[0];
    v[n] = 3.0 * t * t - t + 2.0;
  }
  const CovectorField df = gradient(ScalarField(grid, v));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    EXPECT_NEAR(df[n][0], 6.0 * grid.point(n)[0] - 1.0, 1e-12);
    EXPECT_NEAR(df[n][1], 0.0, 1e-12);
  }
}

TEST(Calculus, DifferenceGradientConvergesAtSecondOrder) {
  const ScalarSource f = random_function(3, 5);
  std::vector<double> errors, h;
  for (int nt : {9, 17, 33}) {
    const CylinderGrid grid(nt, {nt - 1, nt - 1});
    const CovectorField df = gradient(ScalarField::sample(f, grid).without_source());
    double worst = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      worst = std::max(worst, (df[n] - f.gradient(grid.point(n))).cwiseAbs().maxCoeff());
    }
    errors.push_back(worst);
    h.push_back(grid.spacing(0));
  }
  EXPECT_GT(oracle::order(errors[1], errors[2], h[1], h[2]), 1.8);
}

TEST(Calculus, OneformInnerIsSymmetricBitForBit) {
  const CylinderGrid grid(5, {5, 4});
  const MetricField g = sample_metric(random_smooth_metric(3, 3, 0.5), grid);
  const CovectorField a = gradient(ScalarField::sample(random_function(3, 7), grid));
  const CovectorField b = gradient(ScalarField::sample(random_function(3, 8), grid));
  const ScalarField ab = oneform_inner(a, b, g);
  const ScalarField ba = oneform_inner(b, a, g);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    EXPECT_EQ(ab[n], ba[n]);
    EXPECT_NEAR(ab[n], a[n].dot(g.inverse(n) * b[n]), 1e-13);
  }
}

TEST(Calculus, OneformInnerIsPositiveOnNonzeroForms) {
  const CylinderGrid grid(5, {5, 4});
  const MetricField g = sample_metric(random_smooth_metric(3, 6, 0.7), grid);
  const CovectorField a = gradient(ScalarField::sample(random_function(3, 9), grid));
  const ScalarField aa = oneform_inner(a, a, g);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (a[n].norm() > 1e-8) EXPECT_GT(aa[n], 0.0);
  }
}

TEST(Calculus, IntegrateVolumeOfOneOnFlatCylinder) {
  const CylinderGrid grid(9, {8, 8});
  const double vol = integrate_volume(ScalarField::constant(grid, 1.0), sample_metric(flat_metric(3), grid));
  EXPECT_NEAR(vol, 4.0 * oracle::kPi * oracle::kPi, 1e-12);
}

TEST(Calculus, IntegrateVolumeScalesWithConstantMetric) {
  const CylinderGrid grid(5, {8});
  SymMatrix m(2, 2);
  m << 4.0, 0.0, 0.0, 9.0;
  const double vol = integrate_volume(ScalarField::constant(grid, 1.0), sample_metric(constant_metric(m), grid));
  EXPECT_NEAR(vol, 6.0 * 2.0 * oracle::kPi, 1e-12);
}

TEST(Calculus, DivergenceFormRefusesBoundaryNodes) {
  const CylinderGrid grid(5, {4});
  const MatrixField w = weight_field(sample_metric(flat_metric(2), grid));
  const std::vector<double> f(grid.size(), 1.0);
  try {
    divergence_form_at(w, f, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBoundaryLayerRequested);
  }
  EXPECT_NO_THROW(divergence_form_at(w, f, grid.layer_size()));
}

TEST(Calculus, DivergenceFormAnnihilatesConstants) {
  const CylinderGrid grid(9, {8, 8});
  const MatrixField w = weight_field(sample_metric(random_smooth_metric(3, 12, 0.6), grid));
  const ScalarField r = divergence_form_apply(w, ScalarField::constant(grid, 2.5));
  EXPECT_LT(r.max_abs(), 1e-12);
}

TEST(Calculus, FlatLaplacianOfSeparatedModeMatchesDiscreteSymbol) {
  const CylinderGrid grid(9, {8});
  const double ht = grid.spacing(0), hx = grid.spacing(1);
  std::vector<double> v(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Point p = grid.point(n);
    v[n] = std::sin(2.0 * p[0]) * std::cos(p[1]);
  }
  const ScalarField lap = laplace_beltrami_pointwise(sample_metric(flat_metric(2), grid), ScalarField(grid, v));
  const double symbol = (2.0 - 2.0 * std::cos(2.0 * ht)) / (ht * ht) + (2.0 - 2.0 * std::cos(hx)) / (hx * hx);
  for (std::size_t n : grid.interior_nodes()) EXPECT_NEAR(lap[n], -symbol * v[n], 1e-12);
}

TEST(Calculus, ExactLaplaceBeltramiMatchesDifferenceOracle) {
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MetricSource g = random_smooth_metric(3, seed, 0.4);
    const ScalarSource f = random_function(3, 100 + seed);
    for (int trial = 0; trial < 5; ++trial) {
      const Point p = oracle::random_point(3, rng, 0.1, 0.9);
      const double exact = laplace_beltrami_exact(g, f, p);
      EXPECT_NEAR(exact, oracle::laplace_beltrami_fd(g, f.value, p), 1e-5 * (1.0 + std::abs(exact)));
    }
  }
}

TEST(Calculus, PointwiseLaplaceBeltramiConvergesAtSecondOrder) {
  const MetricSource g = random_smooth_metric(2, 4, 0.3);
  const ScalarSource f = random_function(2, 44);
  std::vector<double> errors, h;
  for (int nt : {17, 33, 65}) {
    const CylinderGrid grid(nt, {nt - 1});
    const ScalarField lap = laplace_beltrami_pointwise(sample_metric(g, grid), ScalarField::sample(f, grid));
    double worst = 0.0;
    for (std::size_t n : grid.interior_nodes()) {
      worst = std::max(worst, std::abs(lap[n] - laplace_beltrami_exact(g, f, grid.point(n))));
    }
    errors.push_back(worst);
    h.push_back(grid.spacing(0));
  }
  EXPECT_GT(oracle::order(errors[0], errors[1], h[0], h[1]), 1.7);
  EXPECT_GT(oracle::order(errors[1], errors[2], h[1], h[2]), 1.8);
}

TEST(Calculus, ScalarFieldValueAtInterpolatesWithoutSource) {
  const CylinderGrid grid(5, {4});
  std::vector<double> v(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) v[n] = grid.point(n)[0];
  const ScalarField f(grid, v);
  EXPECT_NEAR(f.value_at(oracle::point({0.3, 1.0})), 0.3, 1e-14);
  EXPECT_DOUBLE_EQ(f.min(), 0.0);
  EXPECT_DOUBLE_EQ(f.max(), 1.0);
}
