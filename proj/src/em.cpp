#include "dlcluster/em.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dlcluster {

void EmConfig::validate() const {
  if (k == 0) throw std::invalid_argument("EmConfig: k must be >= 1");
  if (!(var_floor > 0.0)) throw std::invalid_argument("EmConfig: var_floor must be > 0");
  if (!(tol >= 0.0)) throw std::invalid_argument("EmConfig: tol must be >= 0");
}

namespace {

constexpr double kEmptyMass = 1e-10;

struct EStep {
  Matrix resp;                      // N x K
  std::vector<double> point_log_lik;  // per point
  double log_likelihood = 0.0;
};

EStep e_step(const Gmm& model, const Dataset& data) {
  if (model.dim() != data.dim()) {
    throw std::invalid_argument("EM: model dimension " + std::to_string(model.dim()) +
                                " does not match data dimension " + std::to_string(data.dim()));
  }
  const std::size_t n = data.size();
  const Eigen::Index k = static_cast<Eigen::Index>(model.k());
  EStep out;
  out.resp.resize(static_cast<Eigen::Index>(n), k);
  out.point_log_lik.resize(n);
  const Vector log_w = model.log_weights();
  parallel_for(n, [&](std::size_t i) {
    const Vector joint = component_log_densities(model, data.row(i).transpose()) + log_w;
    const double lse = log_sum_exp(std::span<const double>(joint.data(), static_cast<std::size_t>(k)));
    out.point_log_lik[i] = lse;
    out.resp.row(static_cast<Eigen::Index>(i)) = (joint.array() - lse).exp().matrix().transpose();
  });
  for (double v : out.point_log_lik) out.log_likelihood += v;
  return out;
}

struct MStep {
  Vector weights;
  Matrix means;
  Matrix variances;
  bool floor_fired = false;
  bool reseeded = false;
};

MStep m_step(const Dataset& data, const Matrix& resp, const std::vector<double>* point_log_lik,
             double var_floor) {
  const Matrix& x = data.points();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index k = resp.cols();
  MStep out;
  const Vector mass = resp.colwise().sum().transpose();
  out.weights = mass / static_cast<double>(n);
  out.means = Matrix::Zero(k, d);
  out.variances = Matrix::Zero(k, d);

  const Vector data_var = coordinate_variance(data).cwiseMax(var_floor);
  // Points ordered from least to most likely, used for reseeding.
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (point_log_lik) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return (*point_log_lik)[a] < (*point_log_lik)[b]; });
  }
  std::size_t next_seed = 0;

  for (Eigen::Index c = 0; c < k; ++c) {
    if (mass[c] < kEmptyMass) {
      const std::size_t pick = order[std::min(next_seed++, order.size() - 1)];
      out.means.row(c) = x.row(static_cast<Eigen::Index>(pick));
      out.variances.row(c) = data_var.transpose();
      out.weights[c] = 1.0 / static_cast<double>(n);
      out.reseeded = true;
      continue;
    }
    for (Eigen::Index i = 0; i < n; ++i) out.means.row(c) += resp(i, c) * x.row(i);
    out.means.row(c) /= mass[c];
    for (Eigen::Index i = 0; i < n; ++i) {
      out.variances.row(c) += resp(i, c) * (x.row(i) - out.means.row(c)).array().square().matrix();
    }
    out.variances.row(c) /= mass[c];
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!(out.variances(c, j) >= var_floor)) {
        out.variances(c, j) = var_floor;
        out.floor_fired = true;
      }
    }
  }
  out.weights /= out.weights.sum();
  return out;
}

Gmm to_model(const MStep& m) {
  return Gmm(m.weights.array().log().matrix(), m.means, m.variances.array().log().matrix());
}

}  // namespace

double log_likelihood(const Gmm& model, const Dataset& data) { return e_step(model, data).log_likelihood; }

Matrix responsibilities(const Gmm& model, const Dataset& data) { return e_step(model, data).resp; }

EmStepResult em_step(const Gmm& model, const Dataset& data, double var_floor) {
  if (!(var_floor > 0.0)) throw std::invalid_argument("em_step: var_floor must be > 0");
  const EStep e = e_step(model, data);
  const MStep m = m_step(data, e.resp, &e.point_log_lik, var_floor);
  return EmStepResult{to_model(m), e.log_likelihood, m.floor_fired, m.reseeded};
}

EmResult em_fit(const Dataset& data, const EmConfig& config) {
  config.validate();
  if (config.k > data.size()) {
    throw std::invalid_argument("em: k=" + std::to_string(config.k) + " exceeds N=" + std::to_string(data.size()));
  }
  const Eigen::Index k = static_cast<Eigen::Index>(config.k);
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  Rng init_rng = Rng(config.seed).derive(1);

  MStep start;
  if (config.init == InitMethod::kmeans) {
    KmeansOptions options;
    options.restarts = config.kmeans_restarts;
    const KmeansResult km = kmeans_fit(data, config.k, init_rng, options);
    Matrix hard = Matrix::Zero(n, k);
    for (Eigen::Index i = 0; i < n; ++i) hard(i, km.labels[static_cast<std::size_t>(i)]) = 1.0;
    start = m_step(data, hard, nullptr, config.var_floor);
  } else {
    start.means = initial_means(data, config.k, InitMethod::random, init_rng);
    start.weights = Vector::Constant(k, 1.0 / static_cast<double>(k));
    const Vector var = coordinate_variance(data).cwiseMax(config.var_floor);
    start.variances = var.transpose().replicate(k, 1);
  }

  EmResult result{to_model(start), {}, false};
  bool floor_fired = start.floor_fired;
  bool reseeded = start.reseeded;
  for (std::size_t iter = 0;; ++iter) {
    const EStep e = e_step(result.model, data);
    if (!std::isfinite(e.log_likelihood)) {
      throw std::runtime_error("em: non-finite log-likelihood at iteration " + std::to_string(iter));
    }
    result.history.push_back(EmRecord{iter, e.log_likelihood, floor_fired, reseeded});
    if (iter > 0 && !reseeded) {
      const double gain = (e.log_likelihood - result.history[iter - 1].log_likelihood) / static_cast<double>(n);
      if (std::abs(gain) < config.tol) {
        result.converged = true;
        break;
      }
    }
    if (iter == config.max_iters) break;
    const MStep m = m_step(data, e.resp, &e.point_log_lik, config.var_floor);
    floor_fired = m.floor_fired;
    reseeded = m.reseeded;
    result.model = to_model(m);
  }
  return result;
}

}  // namespace dlcluster
