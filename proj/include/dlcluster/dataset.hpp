#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dlcluster/numerics.hpp"

namespace dlcluster {

using Labels = std::vector<int>;

/// N x d sample matrix (one row per sample) with optional ground-truth labels.
class Dataset {
 public:
  /// Throws std::invalid_argument if N or d is zero, an entry is non-finite,
  /// or labels have the wrong length or a negative entry.
  explicit Dataset(Matrix points, std::optional<Labels> labels = std::nullopt);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }

  const Matrix& points() const { return points_; }
  auto row(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }

  bool has_labels() const { return labels_.has_value(); }
  const std::optional<Labels>& labels() const { return labels_; }

 private:
  Matrix points_;
  std::optional<Labels> labels_;
};

/// Per-coordinate population variance.
Vector coordinate_variance(const Dataset& data);

}  // namespace dlcluster
