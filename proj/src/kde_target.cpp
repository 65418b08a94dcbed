#include "dlcluster/kde_target.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dlcluster {

namespace {

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " + std::to_string(got) + ")");
  }
}

}  // namespace

Vector estimate_bandwidth(const Dataset& data) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("estimate_bandwidth: need at least 2 samples");
  const double d = static_cast<double>(data.dim());
  const double factor = std::pow(static_cast<double>(n), -1.0 / (d + 4.0));
  const Vector variance = coordinate_variance(data) * (static_cast<double>(n) / static_cast<double>(n - 1));
  Vector h(variance.size());
  for (Eigen::Index j = 0; j < h.size(); ++j) {
    const double sigma = std::sqrt(variance[j]);
    const double scaled = sigma * factor;
    h[j] = scaled * scaled;
    if (sigma == 0.0 || !(h[j] > 0.0)) h[j] = kBandwidthFloor;
  }
  return h;
}

KdeTarget::KdeTarget(const Dataset& data, Vector bandwidth_diag)
    : data_(&data), bandwidth_(std::move(bandwidth_diag)) {
  check_dim(data.dim(), static_cast<std::size_t>(bandwidth_.size()), "KdeTarget");
  for (Eigen::Index j = 0; j < bandwidth_.size(); ++j) {
    if (!(bandwidth_[j] > 0.0) || !std::isfinite(bandwidth_[j])) {
      throw std::invalid_argument("KdeTarget: bandwidth entries must be positive");
    }
  }
}

KdeTarget::KdeTarget(const Dataset& data) : KdeTarget(data, estimate_bandwidth(data)) {}

double KdeTarget::log_density(const Vector& x) const {
  check_dim(dim(), static_cast<std::size_t>(x.size()), "kde_density");
  const Vector inv_h = bandwidth_.cwiseInverse();
  const double log_norm =
      -0.5 * (static_cast<double>(dim()) * kLogTwoPi + bandwidth_.array().log().sum());
  std::vector<double> terms(data_->size());
  for (std::size_t i = 0; i < data_->size(); ++i) {
    const auto diff = x.transpose() - data_->row(i);
    terms[i] = log_norm - 0.5 * (diff.array().square() * inv_h.transpose().array()).sum();
  }
  return log_sum_exp(terms) - std::log(static_cast<double>(data_->size()));
}

double KdeTarget::density(const Vector& x) const { return std::exp(log_density(x)); }

double KdeTarget::projected_variance(const UnitVector& u) const {
  check_dim(dim(), u.dim(), "kde_marginal");
  return (u.components().array().square() * bandwidth_.array()).sum();
}

std::vector<double> KdeTarget::projected_points(const UnitVector& u) const {
  check_dim(dim(), u.dim(), "kde_marginal");
  std::vector<double> out(data_->size());
  Eigen::Map<Vector> mapped(out.data(), static_cast<Eigen::Index>(out.size()));
  mapped.noalias() = data_->points() * u.components();
  return out;
}

Mixture1D KdeTarget::marginal(const UnitVector& u) const {
  const double var = projected_variance(u);
  Mixture1D mix;
  mix.means = projected_points(u);
  mix.weights.assign(mix.means.size(), 1.0 / static_cast<double>(mix.means.size()));
  mix.vars.assign(mix.means.size(), var);
  return mix;
}

}  // namespace dlcluster
