#pragma once

#include <cstddef>
#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/numerics.hpp"

namespace dlcluster {

struct KmeansOptions {
  std::size_t max_iters = 300;
  /// Stop once the largest center displacement is at most tol.
  double tol = 1e-6;
  /// Independent k-means++ restarts; the lowest-inertia run wins.
  std::size_t restarts = 1;
};

struct KmeansResult {
  Matrix centers;
  Labels labels;
  /// Sum of squared distances to the assigned center.
  double inertia = 0.0;
  std::size_t iterations = 0;
  /// Inertia after each assignment step of the winning run.
  std::vector<double> inertia_history;
};

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are moved
/// to the point farthest from its current center.
KmeansResult kmeans_fit(const Dataset& data, std::size_t k, Rng& rng, const KmeansOptions& options = {});

enum class InitMethod { kmeans, random };

/// Initial component means: k-means centers, or k distinct random data points.
Matrix initial_means(const Dataset& data, std::size_t k, InitMethod method, Rng& rng,
                     std::size_t kmeans_restarts = 1);

/// Nearest center per row (ties to the lowest index) and the resulting inertia.
double nearest_centers(const Matrix& points, const Matrix& centers, Labels& labels,
                       std::vector<double>* sq_dist = nullptr);

}  // namespace dlcluster
