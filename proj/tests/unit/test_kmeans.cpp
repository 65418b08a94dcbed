#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dlcluster/kmeans.hpp"
#include "dlcluster/metrics.hpp"
#include "dlcluster/synth.hpp"

using namespace dlcluster;

namespace {

Dataset line(std::initializer_list<double> values) {
  Matrix x(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) x(i++, 0) = v;
  return Dataset(x);
}

// Exhaustive minimum inertia over every 2-partition of a 1-D point set.
double best_two_partition_inertia(const std::vector<double>& pts) {
  const std::size_t n = pts.size();
  double best = INFINITY;
  for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
    double s[2] = {0, 0}, c[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      s[(mask >> i) & 1] += pts[i];
      c[(mask >> i) & 1] += 1;
    }
    double inertia = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int g = (mask >> i) & 1;
      inertia += std::pow(pts[i] - s[g] / c[g], 2);
    }
    best = std::min(best, inertia);
  }
  return best;
}

}  // namespace

TEST(Kmeans, FourPointsTwoClusters) {
  const Dataset data = line({0, 1, 10, 11});
  Rng rng(1);
  const KmeansResult r = kmeans_fit(data, 2, rng);
  std::vector<double> centers{r.centers(0, 0), r.centers(1, 0)};
  std::sort(centers.begin(), centers.end());
  EXPECT_NEAR(centers[0], 0.5, 1e-12);
  EXPECT_NEAR(centers[1], 10.5, 1e-12);
  EXPECT_NEAR(best_two_partition_inertia({0, 1, 10, 11}), 1.0, 1e-12);
  EXPECT_NEAR(r.inertia, 1.0, 1e-12);
}

TEST(Kmeans, KEqualsNGivesZeroInertia) {
  const Dataset data = line({3, -1, 7, 2.5, 9});
  Rng rng(2);
  const KmeansResult r = kmeans_fit(data, 5, rng);
  EXPECT_NEAR(r.inertia, 0.0, 1e-12);
  std::set<int> labels(r.labels.begin(), r.labels.end());
  EXPECT_EQ(labels.size(), 5u);
}

TEST(Kmeans, DuplicatedDataSameCenters) {
  const Dataset data = line({0, 1, 10, 11});
  const Dataset doubled = line({0, 1, 10, 11, 0, 1, 10, 11});
  Rng a(3), b(3);
  auto ca = kmeans_fit(data, 2, a).centers;
  auto cb = kmeans_fit(doubled, 2, b).centers;
  std::vector<double> va{ca(0, 0), ca(1, 0)}, vb{cb(0, 0), cb(1, 0)};
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  EXPECT_NEAR(va[0], vb[0], 1e-12);
  EXPECT_NEAR(va[1], vb[1], 1e-12);
}

TEST(Kmeans, InvalidArguments) {
  const Dataset data = line({0, 1, 2});
  Rng rng(4);
  EXPECT_THROW(kmeans_fit(data, 0, rng), std::invalid_argument);
  EXPECT_THROW(kmeans_fit(data, 4, rng), std::invalid_argument);
  KmeansOptions bad;
  bad.max_iters = 0;
  EXPECT_THROW(kmeans_fit(data, 2, rng, bad), std::invalid_argument);
  bad = {};
  bad.tol = -1;
  EXPECT_THROW(kmeans_fit(data, 2, rng, bad), std::invalid_argument);
}

TEST(Kmeans, InertiaNonIncreasingAndSelfConsistent) {
  Rng rng(5);
  for (int inst = 0; inst < 10; ++inst) {
    Matrix x(150, 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < 2; ++j) x(i, j) = rng.normal() + (i % 3) * 2.0;
    const Dataset data(x);
    const KmeansResult r = kmeans_fit(data, 3 + inst % 3, rng);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
      EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] + 1e-9);
    }
    Labels nearest;
    const double recomputed = nearest_centers(data.points(), r.centers, nearest);
    EXPECT_EQ(nearest, r.labels);
    EXPECT_NEAR(r.inertia, recomputed, 1e-6 * recomputed);
    for (int l : r.labels) {
      EXPECT_GE(l, 0);
      EXPECT_LT(l, static_cast<int>(r.centers.rows()));
    }
  }
}

TEST(Kmeans, RecoversSeparatedBlobs) {
  Rng gen(7);
  const Matrix means = lattice_means(4, 5.0);
  const Dataset data = make_blobs(gen, {500, 500, 500, 500}, means, Matrix::Ones(4, 2));
  Rng rng(7);
  const KmeansResult r = kmeans_fit(data, 4, rng);
  EXPECT_GE(ari(*data.labels(), r.labels), 0.99);
}

TEST(Kmeans, EmptyClusterReseeded) {
  // Identical points force empty clusters during Lloyd; every label stays in range.
  Matrix x = Matrix::Zero(6, 1);
  x(5, 0) = 1.0;
  Rng rng(8);
  const KmeansResult r = kmeans_fit(Dataset(x), 3, rng);
  EXPECT_TRUE(r.centers.allFinite());
  EXPECT_NEAR(r.inertia, 0.0, 1e-12);
}

TEST(Kmeans, RestartsNeverWorse) {
  Rng gen(9);
  Matrix x(300, 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < 2; ++j) x(i, j) = gen.normal() * (1 + (i % 5));
  const Dataset data(x);
  Rng a(10), b(10);
  KmeansOptions many;
  many.restarts = 8;
  EXPECT_LE(kmeans_fit(data, 6, b, many).inertia, kmeans_fit(data, 6, a).inertia + 1e-9);
}

TEST(InitialMeans, RandomPicksDistinctRows) {
  const Dataset data = line({0, 1, 2, 3, 4, 5, 6, 7});
  Rng rng(11);
  const Matrix m = initial_means(data, 8, InitMethod::random, rng);
  std::set<double> seen;
  for (Eigen::Index c = 0; c < m.rows(); ++c) seen.insert(m(c, 0));
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_THROW(initial_means(data, 9, InitMethod::random, rng), std::invalid_argument);
}
