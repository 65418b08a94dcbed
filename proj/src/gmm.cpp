#include "dlcluster/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dlcluster {

namespace {

void check_dim(const Gmm& model, std::size_t got, const char* what) {
  if (model.dim() != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (model d=" +
                                std::to_string(model.dim()) + ", got " + std::to_string(got) + ")");
  }
}

std::size_t argmax_first(const Vector& v) {
  std::size_t best = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    if (v[k] > v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(k);
  }
  return best;
}

}  // namespace

Gmm::Gmm(Vector weight_logits, Matrix means, Matrix log_vars)
    : weight_logits_(std::move(weight_logits)), means_(std::move(means)), log_vars_(std::move(log_vars)) {
  if (means_.rows() == 0 || means_.cols() == 0) throw std::invalid_argument("Gmm: need K >= 1 and d >= 1");
  if (weight_logits_.size() != means_.rows() || log_vars_.rows() != means_.rows() ||
      log_vars_.cols() != means_.cols()) {
    throw std::invalid_argument("Gmm: parameter shapes disagree");
  }
  if (!weight_logits_.allFinite() || !means_.allFinite() || log_vars_.hasNaN()) {
    throw std::invalid_argument("Gmm: parameters must be finite");
  }
  log_vars_ = log_vars_.cwiseMax(kLogVarMin).cwiseMin(kLogVarMax);
}

Gmm Gmm::from_constrained(const Vector& weights, Matrix means, const Matrix& variances) {
  if (weights.size() == 0 || (weights.array() < 0.0).any() || !(weights.sum() > 0.0)) {
    throw std::invalid_argument("Gmm: weights must be non-negative with positive sum");
  }
  if (!(variances.array() > 0.0).all()) throw std::invalid_argument("Gmm: variances must be positive");
  // Zero weights map to a very negative finite logit so the model stays a valid mixture.
  const Vector logits = (weights / weights.sum()).array().max(1e-300).log().matrix();
  return Gmm(logits, std::move(means), variances.array().log().matrix());
}

Vector softmax(const Vector& logits) {
  const double peak = logits.maxCoeff();
  Vector w = (logits.array() - peak).exp().matrix();
  return w / w.sum();
}

Vector Gmm::weights() const { return softmax(weight_logits_); }

Vector Gmm::log_weights() const {
  const double peak = weight_logits_.maxCoeff();
  const double lse = peak + std::log((weight_logits_.array() - peak).exp().sum());
  return (weight_logits_.array() - lse).matrix();
}

Matrix Gmm::variances() const { return log_vars_.array().exp().matrix(); }

Vector component_log_densities(const Gmm& model, const Vector& x) {
  check_dim(model, static_cast<std::size_t>(x.size()), "component_densities");
  const std::size_t k = model.k();
  const double d = static_cast<double>(model.dim());
  Vector out(static_cast<Eigen::Index>(k));
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(k); ++c) {
    const auto diff = x.transpose() - model.means().row(c);
    const auto log_var = model.log_vars().row(c);
    out[c] = -0.5 * (d * kLogTwoPi + log_var.sum() +
                     (diff.array().square() * (-log_var.array()).exp()).sum());
  }
  return out;
}

Vector component_densities(const Gmm& model, const Vector& x) {
  return component_log_densities(model, x).array().exp().matrix();
}

PosteriorResult posterior(const Gmm& model, const Vector& x) {
  const Vector joint = component_log_densities(model, x) + model.log_weights();
  const double lse = log_sum_exp(std::span<const double>(joint.data(), static_cast<std::size_t>(joint.size())));
  PosteriorResult result;
  if (!std::isfinite(lse)) {
    result.probabilities = Vector::Constant(joint.size(), 1.0 / static_cast<double>(joint.size()));
    result.fallback = true;
    return result;
  }
  result.probabilities = (joint.array() - lse).exp().matrix();
  return result;
}

Assignment assign(const Gmm& model, const Dataset& data, AssignMode mode, bool keep_responsibilities) {
  check_dim(model, data.dim(), "assign");
  Assignment out;
  out.labels.resize(data.size());
  if (keep_responsibilities) out.responsibilities = Matrix(data.size(), model.k());
  const Vector log_w = model.log_weights();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector x = data.row(i).transpose();
    if (mode == AssignMode::density && !keep_responsibilities) {
      out.labels[i] = static_cast<int>(argmax_first(component_log_densities(model, x)));
      continue;
    }
    const PosteriorResult post = posterior(model, x);
    if (keep_responsibilities) out.responsibilities->row(static_cast<Eigen::Index>(i)) = post.probabilities.transpose();
    out.labels[i] = mode == AssignMode::posterior
                        ? static_cast<int>(argmax_first(post.probabilities))
                        : static_cast<int>(argmax_first(component_log_densities(model, x)));
  }
  return out;
}

Mixture1D gmm_marginal(const Gmm& model, const UnitVector& u) {
  check_dim(model, u.dim(), "gmm_marginal");
  const Vector w = model.weights();
  const Vector proj_means = model.means() * u.components();
  const Vector proj_vars = model.variances() * u.components().array().square().matrix();
  Mixture1D mix;
  mix.weights.assign(w.data(), w.data() + w.size());
  mix.means.assign(proj_means.data(), proj_means.data() + proj_means.size());
  mix.vars.assign(proj_vars.data(), proj_vars.data() + proj_vars.size());
  return mix;
}

double weight_std(const Vector& weights) {
  if (weights.size() == 0) return 0.0;
  const double mean = weights.mean();
  return std::sqrt((weights.array() - mean).square().mean());
}

}  // namespace dlcluster
