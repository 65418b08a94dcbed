#include "dlcluster/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlcluster/gauss_transform.hpp"
#include "dlcluster/marginal.hpp"

namespace dlcluster {

void TrainConfig::validate() const {
  if (k == 0) throw std::invalid_argument("TrainConfig: k must be >= 1");
  if (iters == 0) throw std::invalid_argument("TrainConfig: iters must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("TrainConfig: lr must be > 0");
  if (unit_vectors_per_step == 0) throw std::invalid_argument("TrainConfig: unit_vectors_per_step must be >= 1");
  if (!(wsd_weight >= 0.0) || !std::isfinite(wsd_weight)) {
    throw std::invalid_argument("TrainConfig: wsd_weight must be >= 0");
  }
  if (grid_size < 2) throw std::invalid_argument("TrainConfig: grid_size must be >= 2");
  if (!(plateau_tol >= 0.0)) throw std::invalid_argument("TrainConfig: plateau_tol must be >= 0");
}

namespace {

struct DirectionTerms {
  double kl = 0.0;
  Vector d_weights;  // with respect to the softmax weights
  Matrix d_means;
  Matrix d_log_vars;
};

/// KL(target_u || model_u) on the shared grid and, optionally, its gradient.
DirectionTerms evaluate_direction(const Gmm& model, const Matrix& variances,
                                  const KdeTarget& target, const UnitVector& u, std::size_t grid_size,
                                  bool want_gradient) {
  const std::size_t k = model.k();
  const std::size_t g = grid_size;

  Mixture1D q;
  q.means = target.projected_points(u);
  const double q_var = target.projected_variance(u);
  q.vars.assign(q.means.size(), q_var);
  q.weights.assign(q.means.size(), 1.0 / static_cast<double>(q.means.size()));
  const Mixture1D p = gmm_marginal(model, u);

  const GridBounds bounds = shared_grid_bounds(q, p, kGridPadSigmas);
  const std::vector<double> grid = linear_grid(bounds.lo, bounds.hi, g);

  std::vector<double> f(g), f_slope(g);
  GaussTransform1D(q.means, q_var).evaluate(grid, f, f_slope);

  // comp[j*k + c] = N(t_j; m_c, v_c)
  std::vector<double> comp(g * k);
  std::vector<double> h(g, 0.0), h_slope(g, 0.0);
  std::vector<double> norm(k), inv_var(k);
  for (std::size_t c = 0; c < k; ++c) {
    norm[c] = 1.0 / std::sqrt(2.0 * kPi * p.vars[c]);
    inv_var[c] = 1.0 / p.vars[c];
  }
  for (std::size_t j = 0; j < g; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      const double diff = grid[j] - p.means[c];
      const double n = norm[c] * std::exp(-0.5 * diff * diff * inv_var[c]);
      comp[j * k + c] = n;
      h[j] += p.weights[c] * n;
      h_slope[j] -= p.weights[c] * n * diff * inv_var[c];
    }
  }

  double zq = 0.0, zp = 0.0;
  std::vector<bool> q_active(g), p_active(g);
  for (std::size_t j = 0; j < g; ++j) {
    q_active[j] = f[j] > kMassFloor;
    p_active[j] = h[j] > kMassFloor;
    f[j] = std::max(f[j], kMassFloor);
    h[j] = std::max(h[j], kMassFloor);
    zq += f[j];
    zp += h[j];
  }
  std::vector<double> log_ratio(g);
  double kl = 0.0;
  double q_on_support = 0.0;  // sum of q_j where p_j is above the floor
  for (std::size_t j = 0; j < g; ++j) {
    const double qj = f[j] / zq;
    const double pj = h[j] / zp;
    log_ratio[j] = std::log(qj) - std::log(std::max(pj, kMassFloor));
    kl += qj * log_ratio[j];
    if (pj > kMassFloor) q_on_support += qj;
  }

  DirectionTerms out;
  out.kl = kl;
  if (!want_gradient) return out;

  Vector d_w = Vector::Zero(static_cast<Eigen::Index>(k));
  std::vector<double> d_m(k, 0.0), d_v(k, 0.0);
  std::vector<double> d_t(g, 0.0);
  for (std::size_t j = 0; j < g; ++j) {
    const double qj = f[j] / zq;
    const double pj = h[j] / zp;
    // d kl / d h_j through p = h / zp; -q_j / (p_j zp) written as -q_j / h_j.
    double dh = 0.0;
    if (p_active[j]) dh = (pj > kMassFloor ? -qj / h[j] : 0.0) + q_on_support / zp;
    const double df = q_active[j] ? (log_ratio[j] - kl) / zq : 0.0;
    d_t[j] = dh * h_slope[j] + df * f_slope[j];
    if (dh == 0.0) continue;
    for (std::size_t c = 0; c < k; ++c) {
      const double n = comp[j * k + c];
      const double diff = grid[j] - p.means[c];
      d_w[static_cast<Eigen::Index>(c)] += dh * n;
      const double wn = dh * p.weights[c] * n;
      d_m[c] += wn * diff * inv_var[c];
      d_v[c] += wn * 0.5 * (diff * diff * inv_var[c] - 1.0) * inv_var[c];
    }
  }

  // Grid points are t_j = lo + j (hi - lo) / (g - 1).
  double d_lo = 0.0, d_hi = 0.0;
  const double last = static_cast<double>(g - 1);
  for (std::size_t j = 0; j < g; ++j) {
    const double frac = static_cast<double>(j) / last;
    d_lo += d_t[j] * (1.0 - frac);
    d_hi += d_t[j] * frac;
  }
  if (bounds.lo_side == MixtureSide::p) d_m[bounds.lo_index] += d_lo;
  if (bounds.hi_side == MixtureSide::p) d_m[bounds.hi_index] += d_hi;
  if (bounds.sigma_side == MixtureSide::p) {
    const double d_sigma = kGridPadSigmas * (d_hi - d_lo);
    d_v[bounds.sigma_index] += d_sigma / (2.0 * bounds.sigma_max);
  }

  const Eigen::Index d = static_cast<Eigen::Index>(model.dim());
  out.d_weights = std::move(d_w);
  out.d_means.resize(static_cast<Eigen::Index>(k), d);
  out.d_log_vars.resize(static_cast<Eigen::Index>(k), d);
  for (std::size_t c = 0; c < k; ++c) {
    const Eigen::Index row = static_cast<Eigen::Index>(c);
    for (Eigen::Index jj = 0; jj < d; ++jj) {
      const double uj = u.components()[jj];
      out.d_means(row, jj) = d_m[c] * uj;
      out.d_log_vars(row, jj) = d_v[c] * uj * uj * variances(row, jj);
    }
  }
  return out;
}

void check_inputs(const Gmm& model, const KdeTarget& target, std::span<const UnitVector> directions,
                  std::size_t grid_size) {
  if (model.dim() != target.dim()) {
    throw std::invalid_argument("loss: model dimension " + std::to_string(model.dim()) +
                                " does not match target dimension " + std::to_string(target.dim()));
  }
  if (directions.empty()) throw std::invalid_argument("loss: need at least one direction");
  for (const UnitVector& u : directions) {
    if (u.dim() != model.dim()) throw std::invalid_argument("loss: direction dimension mismatch");
  }
  if (grid_size < 2) throw std::invalid_argument("loss: grid_size must be >= 2");
}

LossAndGradient evaluate(const Gmm& model, const KdeTarget& target, std::span<const UnitVector> directions,
                         double wsd_weight, std::size_t grid_size, bool want_gradient) {
  check_inputs(model, target, directions, grid_size);
  const Vector weights = model.weights();
  const Matrix variances = model.variances();

  std::vector<DirectionTerms> terms(directions.size());
  parallel_for(directions.size(), [&](std::size_t i) {
    terms[i] = evaluate_direction(model, variances, target, directions[i], grid_size, want_gradient);
  });

  const double scale = 1.0 / static_cast<double>(directions.size());
  LossAndGradient out;
  for (const DirectionTerms& t : terms) out.loss.kl += t.kl;
  out.loss.kl *= scale;
  out.loss.wsd = weight_std(weights);
  out.loss.total = out.loss.kl + wsd_weight * out.loss.wsd;
  if (!want_gradient) return out;

  const Eigen::Index k = static_cast<Eigen::Index>(model.k());
  const Eigen::Index d = static_cast<Eigen::Index>(model.dim());
  Vector d_w = Vector::Zero(k);
  out.gradient.means = Matrix::Zero(k, d);
  out.gradient.log_vars = Matrix::Zero(k, d);
  for (const DirectionTerms& t : terms) {
    d_w += t.d_weights;
    out.gradient.means += t.d_means;
    out.gradient.log_vars += t.d_log_vars;
  }
  d_w *= scale;
  out.gradient.means *= scale;
  out.gradient.log_vars *= scale;

  // Population standard deviation: d std / d w_k = (w_k - mean) / (K std).
  if (wsd_weight > 0.0 && out.loss.wsd > 0.0) {
    const double mean = weights.mean();
    d_w.array() += wsd_weight * (weights.array() - mean) / (static_cast<double>(k) * out.loss.wsd);
  }
  // Softmax: d / d logit_k = w_k (d_w_k - sum_i w_i d_w_i).
  out.gradient.weight_logits = (weights.array() * (d_w.array() - weights.dot(d_w))).matrix();
  return out;
}

}  // namespace

LossTerms loss(const Gmm& model, const KdeTarget& target, std::span<const UnitVector> directions,
               double wsd_weight, std::size_t grid_size) {
  return evaluate(model, target, directions, wsd_weight, grid_size, false).loss;
}

LossAndGradient loss_gradients(const Gmm& model, const KdeTarget& target,
                               std::span<const UnitVector> directions, double wsd_weight,
                               std::size_t grid_size) {
  return evaluate(model, target, directions, wsd_weight, grid_size, true);
}

AdamState::AdamState(std::size_t size, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("AdamState: parameter/gradient size mismatch");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw std::invalid_argument("AdamState: non-finite gradient");
  }
  ++steps_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double m_hat = m_[i] / correction1;
    const double v_hat = v_[i] / correction2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

NonFiniteLoss::NonFiniteLoss(const IterationRecord& record, std::vector<IterationRecord> history)
    : std::runtime_error("fit: non-finite loss at iteration " + std::to_string(record.iteration) +
                         " (kl=" + std::to_string(record.kl) + ", wsd=" + std::to_string(record.wsd) + ")"),
      record_(record),
      history_(std::move(history)) {}

Gmm initial_model(const Dataset& data, Matrix means) {
  const std::size_t k = static_cast<std::size_t>(means.rows());
  const Vector variance = coordinate_variance(data);
  const double k2 = static_cast<double>(k * k);
  Matrix log_vars(means.rows(), means.cols());
  for (Eigen::Index c = 0; c < log_vars.rows(); ++c) {
    for (Eigen::Index j = 0; j < log_vars.cols(); ++j) {
      log_vars(c, j) = std::log(std::max(variance[j], 1e-12) / k2);
    }
  }
  Vector logits = Vector::Zero(means.rows());
  return Gmm(std::move(logits), std::move(means), std::move(log_vars));
}

namespace {

// Parameter layout: [logits (K) | means (K*d) | log_vars (K*d)], row-major.
std::vector<double> flatten(const Vector& logits, const Matrix& means, const Matrix& log_vars) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(logits.size() + means.size() + log_vars.size()));
  flat.insert(flat.end(), logits.data(), logits.data() + logits.size());
  flat.insert(flat.end(), means.data(), means.data() + means.size());
  flat.insert(flat.end(), log_vars.data(), log_vars.data() + log_vars.size());
  return flat;
}

Gmm unflatten(const std::vector<double>& flat, Eigen::Index k, Eigen::Index d) {
  const double* ptr = flat.data();
  Vector logits = Eigen::Map<const Vector>(ptr, k);
  Matrix means = Eigen::Map<const Matrix>(ptr + k, k, d);
  Matrix log_vars = Eigen::Map<const Matrix>(ptr + k + k * d, k, d);
  return Gmm(std::move(logits), std::move(means), std::move(log_vars));
}

}  // namespace

TrainReport fit(const Dataset& data, const TrainConfig& config) {
  config.validate();
  if (config.k > data.size()) {
    throw std::invalid_argument("fit: k=" + std::to_string(config.k) + " exceeds N=" + std::to_string(data.size()));
  }
  const KdeTarget target(data);
  const Rng root(config.seed);
  Rng init_rng = root.derive(1);
  Rng direction_rng = root.derive(2);

  const Eigen::Index k = static_cast<Eigen::Index>(config.k);
  const Eigen::Index d = static_cast<Eigen::Index>(data.dim());
  const Gmm start = initial_model(data, initial_means(data, config.k, config.init, init_rng, config.kmeans_restarts));
  std::vector<double> params = flatten(start.weight_logits(), start.means(), start.log_vars());
  AdamState adam(params.size());

  TrainReport report{{}, start, 0, StopReason::max_iters};
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<UnitVector> directions;
  directions.reserve(config.unit_vectors_per_step);

  for (std::size_t iter = 0; iter < config.iters; ++iter) {
    Gmm model = unflatten(params, k, d);
    directions.clear();
    for (std::size_t i = 0; i < config.unit_vectors_per_step; ++i) {
      directions.push_back(sample_unit_vector(direction_rng, data.dim()));
    }
    LossAndGradient lg = loss_gradients(model, target, directions, config.wsd_weight, config.grid_size);
    const IterationRecord record{iter, lg.loss.kl, lg.loss.wsd, lg.loss.total};
    const GmmGradient& grad = lg.gradient;
    if (!std::isfinite(record.total) || !grad.weight_logits.allFinite() || !grad.means.allFinite() ||
        !grad.log_vars.allFinite()) {
      throw NonFiniteLoss(record, std::move(report.history));
    }
    report.history.push_back(record);
    report.final_model = model;

    if (record.total < best - config.plateau_tol) {
      best = record.total;
      since_best = 0;
    } else if (++since_best >= config.plateau_patience) {
      report.stop_reason = StopReason::plateau;
      break;
    }

    std::vector<double> flat_grad = flatten(grad.weight_logits, grad.means, grad.log_vars);
    // Clamped log-variances do not respond to their raw parameter.
    const std::size_t lv_offset = static_cast<std::size_t>(k + k * d);
    for (std::size_t i = lv_offset; i < params.size(); ++i) {
      if (params[i] < kLogVarMin || params[i] > kLogVarMax) flat_grad[i] = 0.0;
    }
    adam.step(params, flat_grad, config.lr);
    report.final_model = unflatten(params, k, d);
  }
  report.iterations_run = report.history.size();
  return report;
}

}  // namespace dlcluster
