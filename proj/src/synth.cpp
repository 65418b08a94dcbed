#include "dlcluster/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dlcluster {

Dataset make_blobs(Rng& rng, const std::vector<std::size_t>& counts, const Matrix& means, const Matrix& vars) {
  const std::size_t k = counts.size();
  if (k == 0) throw std::invalid_argument("make_blobs: need at least one cluster");
  if (static_cast<std::size_t>(means.rows()) != k || vars.rows() != means.rows() || vars.cols() != means.cols() ||
      means.cols() == 0) {
    throw std::invalid_argument("make_blobs: counts, means and vars shapes disagree");
  }
  if (!means.allFinite()) throw std::invalid_argument("make_blobs: means must be finite");
  if (!(vars.array() > 0.0).all() || !vars.allFinite()) {
    throw std::invalid_argument("make_blobs: variances must be positive and finite");
  }
  std::size_t n = 0;
  for (std::size_t c : counts) {
    if (c == 0) throw std::invalid_argument("make_blobs: every count must be >= 1");
    n += c;
  }
  const Eigen::Index d = means.cols();
  Matrix points(static_cast<Eigen::Index>(n), d);
  Labels labels(n);
  const Matrix sd = vars.array().sqrt().matrix();
  std::size_t row = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index kc = static_cast<Eigen::Index>(c);
    for (std::size_t i = 0; i < counts[c]; ++i, ++row) {
      for (Eigen::Index j = 0; j < d; ++j) {
        points(static_cast<Eigen::Index>(row), j) = means(kc, j) + sd(kc, j) * rng.normal();
      }
      labels[row] = static_cast<int>(c);
    }
  }
  return Dataset(std::move(points), std::move(labels));
}

Dataset sample_gmm(Rng& rng, const Gmm& model, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_gmm: n must be >= 1");
  const Vector w = model.weights();
  const Matrix sd = model.variances().array().sqrt().matrix();
  const Eigen::Index d = static_cast<Eigen::Index>(model.dim());
  const Eigen::Index k = static_cast<Eigen::Index>(model.k());
  Matrix points(static_cast<Eigen::Index>(n), d);
  Labels labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    Eigen::Index c = -1;
    double cumulative = 0.0;
    for (Eigen::Index m = 0; m < k; ++m) {
      if (w[m] == 0.0) continue;
      cumulative += w[m];
      c = m;
      if (u < cumulative) break;
    }
    labels[i] = static_cast<int>(c);
    for (Eigen::Index j = 0; j < d; ++j) {
      points(static_cast<Eigen::Index>(i), j) = model.means()(c, j) + sd(c, j) * rng.normal();
    }
  }
  return Dataset(std::move(points), std::move(labels));
}

Matrix lattice_means(std::size_t k, double sep) {
  if (k == 0) throw std::invalid_argument("lattice_means: k must be >= 1");
  if (!(sep > 0.0) || !std::isfinite(sep)) throw std::invalid_argument("lattice_means: sep must be positive");
  const std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k))));
  const std::size_t rows = (k + side - 1) / side;
  Matrix means(static_cast<Eigen::Index>(k), 2);
  for (std::size_t c = 0; c < k; ++c) {
    const double col = static_cast<double>(c % side);
    const double row = static_cast<double>(c / side);
    means(static_cast<Eigen::Index>(c), 0) = 2.0 * sep * (col - 0.5 * static_cast<double>(side - 1));
    means(static_cast<Eigen::Index>(c), 1) = 2.0 * sep * (row - 0.5 * static_cast<double>(rows - 1));
  }
  return means;
}

}  // namespace dlcluster
