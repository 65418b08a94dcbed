#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dlcluster {

/// Floor applied to unnormalized grid densities and to masses inside the KL log.
inline constexpr double kMassFloor = 1e-300;

/// A one-dimensional Gaussian mixture.
struct Mixture1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> vars;

  std::size_t size() const { return weights.size(); }
  /// Throws unless sizes agree, vars > 0 and weights sum to 1 within 1e-9.
  void validate() const;
};

double log_pdf(const Mixture1D& mix, double t);
double pdf(const Mixture1D& mix, double t);

enum class MixtureSide { q, p };

/// Where each grid bound came from, so callers can differentiate through it.
struct GridBounds {
  double lo = 0.0;
  double hi = 0.0;
  MixtureSide lo_side = MixtureSide::q;
  std::size_t lo_index = 0;
  MixtureSide hi_side = MixtureSide::q;
  std::size_t hi_index = 0;
  MixtureSide sigma_side = MixtureSide::q;
  std::size_t sigma_index = 0;
  double sigma_max = 0.0;
};

/// [min mean - pad*sigma_max, max mean + pad*sigma_max] over both mixtures.
GridBounds shared_grid_bounds(const Mixture1D& q, const Mixture1D& p, double pad_sigmas);

std::vector<double> shared_grid(const Mixture1D& q, const Mixture1D& p, std::size_t g = 1024,
                                double pad_sigmas = 6.0);

struct DiscretizedPdf {
  std::vector<double> grid;
  std::vector<double> mass;
};

/// Mass proportional to the floored density at each grid point, summing to 1.
DiscretizedPdf discretize(const Mixture1D& mix, std::span<const double> grid);

/// sum_i q_i ln(q_i / max(p_i, floor)); the grids must be identical.
double kl_discrete(const DiscretizedPdf& q, const DiscretizedPdf& p);

}  // namespace dlcluster
