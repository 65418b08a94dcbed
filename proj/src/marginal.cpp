#include "dlcluster/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dlcluster/numerics.hpp"

namespace dlcluster {

void Mixture1D::validate() const {
  if (weights.empty() || means.size() != weights.size() || vars.size() != weights.size()) {
    throw std::invalid_argument("Mixture1D: weights, means and vars must be non-empty and equal length");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < size(); ++m) {
    if (!(weights[m] >= 0.0) || !(vars[m] > 0.0) || !std::isfinite(means[m]) ||
        !std::isfinite(vars[m])) {
      throw std::invalid_argument("Mixture1D: invalid component parameters");
    }
    total += weights[m];
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("Mixture1D: weights must sum to 1");
}

double log_pdf(const Mixture1D& mix, double t) {
  std::vector<double> terms(mix.size());
  for (std::size_t m = 0; m < mix.size(); ++m) {
    const double diff = t - mix.means[m];
    terms[m] = std::log(mix.weights[m]) - 0.5 * (kLogTwoPi + std::log(mix.vars[m])) -
               0.5 * diff * diff / mix.vars[m];
  }
  return log_sum_exp(terms);
}

double pdf(const Mixture1D& mix, double t) { return std::exp(log_pdf(mix, t)); }

GridBounds shared_grid_bounds(const Mixture1D& q, const Mixture1D& p, double pad_sigmas) {
  if (q.size() == 0 || p.size() == 0) throw std::invalid_argument("shared_grid: empty mixture");
  GridBounds b;
  double min_mean = std::numeric_limits<double>::infinity();
  double max_mean = -min_mean;
  double max_var = 0.0;
  auto scan = [&](const Mixture1D& mix, MixtureSide side) {
    for (std::size_t m = 0; m < mix.size(); ++m) {
      if (mix.means[m] < min_mean) {
        min_mean = mix.means[m];
        b.lo_side = side;
        b.lo_index = m;
      }
      if (mix.means[m] > max_mean) {
        max_mean = mix.means[m];
        b.hi_side = side;
        b.hi_index = m;
      }
      if (mix.vars[m] > max_var) {
        max_var = mix.vars[m];
        b.sigma_side = side;
        b.sigma_index = m;
      }
    }
  };
  scan(q, MixtureSide::q);
  scan(p, MixtureSide::p);
  b.sigma_max = std::sqrt(max_var);
  b.lo = min_mean - pad_sigmas * b.sigma_max;
  b.hi = max_mean + pad_sigmas * b.sigma_max;
  return b;
}

std::vector<double> shared_grid(const Mixture1D& q, const Mixture1D& p, std::size_t g,
                                double pad_sigmas) {
  const GridBounds b = shared_grid_bounds(q, p, pad_sigmas);
  return linear_grid(b.lo, b.hi, g);
}

DiscretizedPdf discretize(const Mixture1D& mix, std::span<const double> grid) {
  if (grid.size() < 2) throw std::invalid_argument("discretize: grid needs at least 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("discretize: grid must be strictly increasing");
  }
  DiscretizedPdf out{std::vector<double>(grid.begin(), grid.end()), std::vector<double>(grid.size())};
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.mass[i] = std::max(pdf(mix, grid[i]), kMassFloor);
    total += out.mass[i];
  }
  for (double& m : out.mass) m /= total;
  return out;
}

double kl_discrete(const DiscretizedPdf& q, const DiscretizedPdf& p) {
  if (q.grid != p.grid || q.mass.size() != q.grid.size() || p.mass.size() != p.grid.size()) {
    throw std::invalid_argument("kl_discrete: grids differ");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < q.mass.size(); ++i) {
    if (q.mass[i] > 0.0) kl += q.mass[i] * (std::log(q.mass[i]) - std::log(std::max(p.mass[i], kMassFloor)));
  }
  return kl;
}

}  // namespace dlcluster
