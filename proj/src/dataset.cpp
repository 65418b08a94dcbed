#include "dlcluster/dataset.hpp"

#include <stdexcept>
#include <string>

namespace dlcluster {

Dataset::Dataset(Matrix points, std::optional<Labels> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw std::invalid_argument("Dataset: need at least one sample and one dimension");
  }
  if (!points_.allFinite()) throw std::invalid_argument("Dataset: entries must be finite");
  if (labels_) {
    if (labels_->size() != size()) {
      throw std::invalid_argument("Dataset: " + std::to_string(labels_->size()) +
                                  " labels for " + std::to_string(size()) + " samples");
    }
    for (int l : *labels_) {
      if (l < 0) throw std::invalid_argument("Dataset: labels must be non-negative");
    }
  }
}

Vector coordinate_variance(const Dataset& data) {
  const Vector mean = data.points().colwise().mean().transpose();
  const Matrix centered = data.points().rowwise() - mean.transpose();
  return (centered.array().square().colwise().sum() / static_cast<double>(data.size()))
      .transpose();
}

}  // namespace dlcluster
