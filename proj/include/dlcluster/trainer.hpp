#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/gmm.hpp"
#include "dlcluster/kde_target.hpp"
#include "dlcluster/kmeans.hpp"
#include "dlcluster/numerics.hpp"

namespace dlcluster {

/// Grid padding, in units of the widest projected component's standard deviation.
inline constexpr double kGridPadSigmas = 6.0;

struct TrainConfig {
  std::size_t k = 2;
  std::size_t iters = 5000;
  double lr = 1e-4;
  std::size_t unit_vectors_per_step = 32;
  /// Multiplier c on the weight-standard-deviation penalty.
  double wsd_weight = 1.0;
  std::size_t grid_size = 1024;
  InitMethod init = InitMethod::kmeans;
  std::uint64_t seed = 0;
  std::size_t plateau_patience = 200;
  double plateau_tol = 1e-6;
  std::size_t kmeans_restarts = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct LossTerms {
  double total = 0.0;
  double kl = 0.0;
  double wsd = 0.0;
};

/// Gradient with respect to the model's unconstrained parameters.
struct GmmGradient {
  Vector weight_logits;
  Matrix means;
  Matrix log_vars;
};

struct LossAndGradient {
  LossTerms loss;
  GmmGradient gradient;
};

/**
 * Mean over `directions` of the discrete KL between the target and model
 * marginals on their shared grid, plus c times the weight standard deviation.
 */
LossTerms loss(const Gmm& model, const KdeTarget& target, std::span<const UnitVector> directions,
               double wsd_weight, std::size_t grid_size);

/// loss() together with its exact gradient, including the grid's dependence
/// on the model through its bounds.
LossAndGradient loss_gradients(const Gmm& model, const KdeTarget& target,
                               std::span<const UnitVector> directions, double wsd_weight,
                               std::size_t grid_size);

/// Adam with bias correction (beta1 0.9, beta2 0.999, eps 1e-8).
class AdamState {
 public:
  explicit AdamState(std::size_t size, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  /// Updates params in place. Throws std::invalid_argument on a size mismatch
  /// or a non-finite gradient.
  void step(std::span<double> params, std::span<const double> grads, double lr);

  std::size_t steps() const { return steps_; }

 private:
  double beta1_, beta2_, eps_;
  std::size_t steps_ = 0;
  std::vector<double> m_, v_;
};

struct IterationRecord {
  std::size_t iteration = 0;
  double kl = 0.0;
  double wsd = 0.0;
  double total = 0.0;
};

enum class StopReason { max_iters, plateau };

struct TrainReport {
  std::vector<IterationRecord> history;
  Gmm final_model;
  std::size_t iterations_run = 0;
  StopReason stop_reason = StopReason::max_iters;
};

/// Raised when the loss or gradient stops being finite during fit().
class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss(const IterationRecord& record, std::vector<IterationRecord> history);
  const IterationRecord& record() const { return record_; }
  const std::vector<IterationRecord>& history() const { return history_; }

 private:
  IterationRecord record_;
  std::vector<IterationRecord> history_;
};

/// Starting point used by fit(): given means, uniform weights, and per-coordinate
/// data variance divided by k^2.
Gmm initial_model(const Dataset& data, Matrix means);

/**
 * Fits a K-component GMM to the KDE target of `data` by Adam on the
 * marginalized KL loss, drawing fresh random directions every iteration.
 * Deterministic for a given config.seed.
 */
TrainReport fit(const Dataset& data, const TrainConfig& config);

}  // namespace dlcluster
