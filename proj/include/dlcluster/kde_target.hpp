#pragma once

#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/marginal.hpp"
#include "dlcluster/numerics.hpp"

namespace dlcluster {

inline constexpr double kBandwidthFloor = 1e-6;

/// Scott's rule per coordinate: (sigma_j * N^(-1/(d+4)))^2, sample standard
/// deviation, floored at kBandwidthFloor. Requires N >= 2.
Vector estimate_bandwidth(const Dataset& data);

/**
 * Equal-weight Gaussian mixture with one component per data point and a
 * shared diagonal bandwidth. Holds a reference to the dataset, which must
 * outlive it.
 */
class KdeTarget {
 public:
  KdeTarget(const Dataset& data, Vector bandwidth_diag);
  /// Uses estimate_bandwidth.
  explicit KdeTarget(const Dataset& data);

  const Dataset& data() const { return *data_; }
  const Vector& bandwidth() const { return bandwidth_; }
  std::size_t dim() const { return data_->dim(); }

  double log_density(const Vector& x) const;
  double density(const Vector& x) const;

  /// Variance of every projected component: sum_j u_j^2 H_jj.
  double projected_variance(const UnitVector& u) const;
  /// u . x_i for every data point.
  std::vector<double> projected_points(const UnitVector& u) const;

  Mixture1D marginal(const UnitVector& u) const;

 private:
  const Dataset* data_;
  Vector bandwidth_;
};

inline double kde_density(const KdeTarget& target, const Vector& x) { return target.density(x); }

inline Mixture1D kde_marginal(const KdeTarget& target, const UnitVector& u) {
  return target.marginal(u);
}

}  // namespace dlcluster
