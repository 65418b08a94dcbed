#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dlcluster/marginal.hpp"
#include "dlcluster/numerics.hpp"
#include "oracles.hpp"

using namespace dlcluster;

namespace {

Mixture1D gaussian(double mean, double var) { return Mixture1D{{1.0}, {mean}, {var}}; }

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(Mixture1D, ValidateRejectsBadInput) {
  EXPECT_NO_THROW(gaussian(0, 1).validate());
  EXPECT_THROW((Mixture1D{{0.5}, {0}, {1}}).validate(), std::invalid_argument);
  EXPECT_THROW((Mixture1D{{1.0}, {0}, {0}}).validate(), std::invalid_argument);
  EXPECT_THROW((Mixture1D{{1.0}, {0, 1}, {1}}).validate(), std::invalid_argument);
  EXPECT_THROW((Mixture1D{}).validate(), std::invalid_argument);
}

TEST(Pdf, StandardNormalPeak) { EXPECT_NEAR(pdf(gaussian(0, 1), 0.0), 0.39894, 1e-5); }

TEST(Pdf, SymmetricMixture) {
  const Mixture1D m{{0.5, 0.5}, {-1.5, 1.5}, {0.7, 0.7}};
  for (double t : {0.1, 0.9, 2.5, 7.0}) EXPECT_NEAR(pdf(m, -t), pdf(m, t), 1e-15);
}

TEST(Pdf, TwoComponentsAtDistanceOne) {
  const Mixture1D m{{0.5, 0.5}, {0.0, 2.0}, {1.0, 1.0}};
  EXPECT_NEAR(pdf(m, 1.0), 0.5 * (oracle::normal_pdf(1, 0, 1) + oracle::normal_pdf(1, 2, 1)), 1e-15);
  EXPECT_NEAR(pdf(m, 1.0), 0.24197, 1e-5);
}

TEST(SharedGrid, SingleStandardNormal) {
  const auto g = shared_grid(gaussian(0, 1), gaussian(0, 1), 3, 6.0);
  EXPECT_EQ(g, (std::vector<double>{-6.0, 0.0, 6.0}));
}

TEST(SharedGrid, WidensWithPad) {
  const Mixture1D q{{0.5, 0.5}, {-1, 2}, {0.5, 1.0}};
  const Mixture1D p{{1.0}, {0.5}, {4.0}};
  double prev_lo = 0, prev_hi = 0;
  for (double pad : {0.0, 1.0, 3.0, 6.0, 8.0}) {
    const auto g = shared_grid(q, p, 16, pad);
    if (pad > 0) {
      EXPECT_LT(g.front(), prev_lo);
      EXPECT_GT(g.back(), prev_hi);
    }
    prev_lo = g.front();
    prev_hi = g.back();
  }
}

TEST(SharedGrid, CoversAllMeansAndRecordsBounds) {
  const Mixture1D q{{0.5, 0.5}, {-1, 2}, {0.5, 1.0}};
  const Mixture1D p{{0.3, 0.7}, {-4, 0.5}, {4.0, 0.1}};
  const GridBounds b = shared_grid_bounds(q, p, 6.0);
  EXPECT_EQ(b.lo_side, MixtureSide::p);
  EXPECT_EQ(b.lo_index, 0u);
  EXPECT_EQ(b.hi_side, MixtureSide::q);
  EXPECT_EQ(b.hi_index, 1u);
  EXPECT_EQ(b.sigma_side, MixtureSide::p);
  EXPECT_EQ(b.sigma_max, 2.0);
  EXPECT_EQ(b.lo, -16.0);
  EXPECT_EQ(b.hi, 14.0);
  const auto g = shared_grid(q, p);
  EXPECT_EQ(g.size(), 1024u);
  for (double m : {-1.0, 2.0, -4.0, 0.5}) {
    EXPECT_LE(g.front(), m);
    EXPECT_GE(g.back(), m);
  }
}

TEST(Discretize, MassSumsToOne) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const Mixture1D m{{0.2, 0.8}, {rng.normal(), 3 * rng.normal()}, {0.1 + rng.uniform(), 2.0}};
    const auto d = discretize(m, linear_grid(-20, 20, 257));
    EXPECT_NEAR(sum(d.mass), 1.0, 1e-12);
    for (double v : d.mass) EXPECT_GE(v, 0.0);
  }
}

TEST(Discretize, TranslationInvariant) {
  const Mixture1D m{{0.4, 0.6}, {-1.0, 1.5}, {0.5, 1.2}};
  const Mixture1D shifted{{0.4, 0.6}, {2.0, 4.5}, {0.5, 1.2}};
  const auto g = shared_grid(m, m, 512, 6.0);
  std::vector<double> g2(g);
  for (double& t : g2) t += 3.0;
  const auto a = discretize(m, g);
  const auto b = discretize(shifted, g2);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.mass[i], b.mass[i], 1e-12);
}

TEST(Discretize, SymmetricMeanNearZero) {
  const auto d = discretize(gaussian(0, 1), shared_grid(gaussian(0, 1), gaussian(0, 1), 1024, 6.0));
  double mean = 0.0;
  for (std::size_t i = 0; i < d.grid.size(); ++i) mean += d.grid[i] * d.mass[i];
  EXPECT_NEAR(mean, 0.0, 1e-3);
}

TEST(Discretize, RejectsBadGrid) {
  EXPECT_THROW(discretize(gaussian(0, 1), std::vector<double>{0.0}), std::invalid_argument);
  EXPECT_THROW(discretize(gaussian(0, 1), std::vector<double>{0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST(Discretize, FloorKeepsMassPositive) {
  const auto d = discretize(gaussian(0, 1e-4), linear_grid(-100, 100, 64));
  for (double v : d.mass) EXPECT_GT(v, 0.0);
}

TEST(KlDiscrete, SelfDivergenceZero) {
  const Mixture1D m{{0.3, 0.7}, {-2, 1}, {0.4, 1.1}};
  const auto d = discretize(m, shared_grid(m, m));
  EXPECT_NEAR(kl_discrete(d, d), 0.0, 1e-12);
}

TEST(KlDiscrete, NonNegative) {
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const Mixture1D q{{0.5, 0.5}, {rng.normal(), rng.normal()}, {0.2 + rng.uniform(), 0.2 + rng.uniform()}};
    const Mixture1D p = gaussian(2 * rng.normal(), 0.1 + 3 * rng.uniform());
    const auto g = shared_grid(q, p);
    EXPECT_GE(kl_discrete(discretize(q, g), discretize(p, g)), -1e-12);
  }
}

TEST(KlDiscrete, UnitShiftIsOneHalf) {
  const auto g = linear_grid(-8, 9, 2048);
  const double kl = kl_discrete(discretize(gaussian(0, 1), g), discretize(gaussian(1, 1), g));
  EXPECT_NEAR(oracle::gaussian_kl(0, 1, 1, 1), 0.5, 1e-15);
  EXPECT_NEAR(kl, 0.5, 0.01);
}

TEST(KlDiscrete, GridMismatchRejected) {
  const auto a = discretize(gaussian(0, 1), linear_grid(-5, 5, 10));
  const auto b = discretize(gaussian(0, 1), linear_grid(-5, 6, 10));
  EXPECT_THROW(kl_discrete(a, b), std::invalid_argument);
}

TEST(KlDiscrete, MatchesClosedFormAndRefinementStable) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double m1 = -3 + 6 * rng.uniform(), m2 = -3 + 6 * rng.uniform();
    const double s1 = 0.5 + 1.5 * rng.uniform(), s2 = 0.5 + 1.5 * rng.uniform();
    const Mixture1D q = gaussian(m1, s1 * s1), p = gaussian(m2, s2 * s2);
    const auto g = shared_grid(q, p, 2048, 8.0);
    const double kl = kl_discrete(discretize(q, g), discretize(p, g));
    EXPECT_NEAR(kl, oracle::gaussian_kl(m1, s1, m2, s2), 0.01);
    const auto g2 = shared_grid(q, p, 4096, 8.0);
    EXPECT_NEAR(kl_discrete(discretize(q, g2), discretize(p, g2)), kl, 1e-3);
  }
}
