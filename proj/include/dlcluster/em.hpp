#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/gmm.hpp"
#include "dlcluster/kmeans.hpp"

namespace dlcluster {

struct EmConfig {
  std::size_t k = 2;
  std::size_t max_iters = 200;
  /// Stop once the mean per-point log-likelihood improves by less than this.
  double tol = 1e-6;
  double var_floor = 1e-6;
  InitMethod init = InitMethod::kmeans;
  std::uint64_t seed = 0;
  std::size_t kmeans_restarts = 1;

  void validate() const;
};

struct EmRecord {
  std::size_t iteration = 0;
  /// Total log-likelihood of the data under the current model.
  double log_likelihood = 0.0;
  /// The M-step that produced this model clamped at least one variance.
  bool floor_fired = false;
  /// The M-step that produced this model reseeded an empty component.
  bool reseeded = false;
};

struct EmResult {
  Gmm model;
  std::vector<EmRecord> history;
  bool converged = false;
};

/// sum_i log sum_k w_k N(x_i; mu_k, Sigma_k), log-sum-exp stabilized.
double log_likelihood(const Gmm& model, const Dataset& data);

/// N x K posterior responsibilities; rows sum to 1.
Matrix responsibilities(const Gmm& model, const Dataset& data);

struct EmStepResult {
  Gmm model;
  /// Log-likelihood of the input model.
  double log_likelihood = 0.0;
  bool floor_fired = false;
  bool reseeded = false;
};

/**
 * One E-step on `model` followed by an M-step. A component with total
 * responsibility below 1e-10 is moved to the least likely point not yet used
 * for reseeding, with the data variance and weight 1/N.
 */
EmStepResult em_step(const Gmm& model, const Dataset& data, double var_floor);

/// Diagonal-covariance EM. history[0] is the initial model.
EmResult em_fit(const Dataset& data, const EmConfig& config);

}  // namespace dlcluster
