#include "dlcluster/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dlcluster {

namespace {

Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Matrix centers(static_cast<Eigen::Index>(k), points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n))));
  std::vector<double> dist2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) dist2[i] = (points.row(i) - centers.row(0)).squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : dist2) total += v;
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= dist2[i];
        if (target < 0.0 && dist2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(n)));
    }
    centers.row(static_cast<Eigen::Index>(c)) = points.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], (points.row(i) - points.row(chosen)).squaredNorm());
    }
  }
  return centers;
}

KmeansResult lloyd(const Matrix& points, Matrix centers, const KmeansOptions& options) {
  const Eigen::Index n = points.rows();
  const Eigen::Index k = centers.rows();
  KmeansResult result;
  std::vector<double> sq_dist;
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    result.inertia_history.push_back(nearest_centers(points, centers, result.labels, &sq_dist));

    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(result.labels[i]) += points.row(i);
      ++counts[static_cast<std::size_t>(result.labels[i])];
    }
    Matrix updated = centers;
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        updated.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: reseed at the point farthest from its center.
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!taken[i] && (far < 0 || sq_dist[i] > sq_dist[far])) far = i;
      }
      if (far >= 0) {
        taken[far] = true;
        updated.row(c) = points.row(far);
      }
    }
    const double shift = (updated - centers).rowwise().norm().maxCoeff();
    centers = std::move(updated);
    result.iterations = iter + 1;
    if (shift <= options.tol) break;
  }
  result.inertia = nearest_centers(points, centers, result.labels);
  result.centers = std::move(centers);
  return result;
}

}  // namespace

double nearest_centers(const Matrix& points, const Matrix& centers, Labels& labels,
                       std::vector<double>* sq_dist) {
  const Eigen::Index n = points.rows();
  labels.assign(static_cast<std::size_t>(n), 0);
  if (sq_dist) sq_dist->assign(static_cast<std::size_t>(n), 0.0);
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d2 = (points.row(i) - centers.row(c)).squaredNorm();
      if (d2 < best) {
        best = d2;
        labels[static_cast<std::size_t>(i)] = static_cast<int>(c);
      }
    }
    if (sq_dist) (*sq_dist)[static_cast<std::size_t>(i)] = best;
    inertia += best;
  }
  return inertia;
}

KmeansResult kmeans_fit(const Dataset& data, std::size_t k, Rng& rng, const KmeansOptions& options) {
  if (k == 0) throw std::invalid_argument("kmeans: k must be >= 1");
  if (k > data.size()) throw std::invalid_argument("kmeans: k exceeds the number of samples");
  if (options.max_iters == 0) throw std::invalid_argument("kmeans: max_iters must be >= 1");
  if (!(options.tol >= 0.0)) throw std::invalid_argument("kmeans: tol must be >= 0");
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  KmeansResult best;
  for (std::size_t r = 0; r < restarts; ++r) {
    KmeansResult run = lloyd(data.points(), seed_plus_plus(data.points(), k, rng), options);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

Matrix initial_means(const Dataset& data, std::size_t k, InitMethod method, Rng& rng,
                     std::size_t kmeans_restarts) {
  if (k == 0 || k > data.size()) throw std::invalid_argument("initial_means: need 1 <= k <= N");
  if (method == InitMethod::kmeans) {
    KmeansOptions options;
    options.restarts = kmeans_restarts;
    return kmeans_fit(data, k, rng, options).centers;
  }
  // Partial Fisher-Yates shuffle picks k distinct rows.
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Matrix means(static_cast<Eigen::Index>(k), data.points().cols());
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t pick = c + rng.uniform_index(order.size() - c);
    std::swap(order[c], order[pick]);
    means.row(static_cast<Eigen::Index>(c)) = data.row(order[c]);
  }
  return means;
}

}  // namespace dlcluster
