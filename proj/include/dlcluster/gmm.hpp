#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/marginal.hpp"
#include "dlcluster/numerics.hpp"

namespace dlcluster {

inline constexpr double kLogVarMin = -20.0;
inline constexpr double kLogVarMax = 20.0;

/**
 * K-component diagonal-covariance Gaussian mixture in unconstrained form:
 * weights are softmax(weight_logits), variances are exp(log_vars) with
 * log_vars clamped to [kLogVarMin, kLogVarMax] on construction.
 */
class Gmm {
 public:
  Gmm(Vector weight_logits, Matrix means, Matrix log_vars);

  /// From weights (positive, renormalized), means and variances (positive).
  static Gmm from_constrained(const Vector& weights, Matrix means, const Matrix& variances);

  std::size_t k() const { return static_cast<std::size_t>(means_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(means_.cols()); }

  const Vector& weight_logits() const { return weight_logits_; }
  const Matrix& means() const { return means_; }
  const Matrix& log_vars() const { return log_vars_; }

  Vector weights() const;
  Vector log_weights() const;
  Matrix variances() const;

 private:
  Vector weight_logits_;
  Matrix means_;
  Matrix log_vars_;
};

Vector softmax(const Vector& logits);

/// log N(x; mu_k, diag Sigma_k) for each component.
Vector component_log_densities(const Gmm& model, const Vector& x);
Vector component_densities(const Gmm& model, const Vector& x);

struct PosteriorResult {
  Vector probabilities;
  /// True when every component log-density was -inf and the uniform fallback was used.
  bool fallback = false;
};

PosteriorResult posterior(const Gmm& model, const Vector& x);

enum class AssignMode { posterior, density };

struct Assignment {
  Labels labels;
  std::optional<Matrix> responsibilities;
};

/// Argmax cluster per row; ties go to the lowest component index.
Assignment assign(const Gmm& model, const Dataset& data, AssignMode mode = AssignMode::posterior,
                  bool keep_responsibilities = false);

Mixture1D gmm_marginal(const Gmm& model, const UnitVector& u);

/// Population standard deviation of the mixture weights.
double weight_std(const Vector& weights);
inline double weight_std(const Gmm& model) { return weight_std(model.weights()); }

}  // namespace dlcluster
