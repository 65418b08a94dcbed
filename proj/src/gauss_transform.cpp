#include "dlcluster/gauss_transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dlcluster/numerics.hpp"

namespace dlcluster {

namespace {

constexpr std::size_t kTerms = 20;
constexpr double kBoxWidth = 1.0;  // in units of delta
// Boxes farther than this (in units of delta) contribute below exp(-49) of their mass.
constexpr double kCutoff = 7.0;

}  // namespace

GaussTransform1D::GaussTransform1D(std::span<const double> sources, double variance,
                                   Strategy strategy)
    : sources_(sources.begin(), sources.end()), variance_(variance), delta_(std::sqrt(2.0 * variance)) {
  if (sources_.empty()) throw std::invalid_argument("GaussTransform1D: no sources");
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("GaussTransform1D: variance must be positive");
  }
  std::sort(sources_.begin(), sources_.end());

  const double width = kBoxWidth * delta_;
  const double origin = sources_.front();
  const double weight = 1.0 / static_cast<double>(sources_.size());
  std::vector<Box> boxes;
  long current = -1;
  for (double a : sources_) {
    const long index = static_cast<long>(std::floor((a - origin) / width));
    if (index != current) {
      current = index;
      boxes.push_back(Box{origin + (static_cast<double>(index) + 0.5) * width,
                          std::vector<double>(kTerms, 0.0)});
    }
    Box& box = boxes.back();
    const double y = (a - box.center) / delta_;
    double term = weight;
    for (std::size_t n = 0; n < kTerms; ++n) {
      box.coeffs[n] += term;
      term *= y / static_cast<double>(n + 1);
    }
  }
  // The expansion costs ~2*kTerms flops per (box, point); direct costs one exp per (source, point).
  const bool cheaper = boxes.size() * kTerms < 4 * sources_.size();
  if (strategy == Strategy::expansion || (strategy == Strategy::automatic && cheaper)) {
    boxes_ = std::move(boxes);
  }
}

void GaussTransform1D::evaluate(std::span<const double> t, std::span<double> value,
                                std::span<double> slope) const {
  if (value.size() != t.size() || slope.size() != t.size()) {
    throw std::invalid_argument("GaussTransform1D: output size mismatch");
  }
  if (boxes_.empty()) {
    evaluate_direct(t, value, slope);
    return;
  }
  const double norm = 1.0 / std::sqrt(2.0 * kPi * variance_);
  std::fill(value.begin(), value.end(), 0.0);
  std::fill(slope.begin(), slope.end(), 0.0);
  const bool sorted = std::is_sorted(t.begin(), t.end());
  const double reach = (kCutoff + 0.5 * kBoxWidth) * delta_;
  for (const Box& box : boxes_) {
    std::size_t first = 0;
    std::size_t last = t.size();
    if (sorted) {
      first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), box.center - reach) - t.begin());
      last = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), box.center + reach) - t.begin());
    }
    const double* c = box.coeffs.data();
    // Blocks of grid points keep the inner loop independent across points.
    constexpr std::size_t kBlock = 64;
    double x2[kBlock], h_prev[kBlock], h_cur[kBlock], v[kBlock], s[kBlock];
    for (std::size_t j0 = first; j0 < last; j0 += kBlock) {
      const std::size_t m = std::min(kBlock, last - j0);
      for (std::size_t b = 0; b < m; ++b) {
        const double dt = t[j0 + b] - box.center;
        const double x = dt / delta_;
        x2[b] = 2.0 * x;
        h_prev[b] = std::abs(dt) > reach ? 0.0 : std::exp(-x * x);
        h_cur[b] = x2[b] * h_prev[b];
        v[b] = c[0] * h_prev[b];
        s[b] = c[0] * h_cur[b];
      }
      // Hermite functions h_n(x) = H_n(x) exp(-x^2) by their three-term recurrence.
      for (std::size_t n = 1; n < kTerms; ++n) {
        const double two_n = 2.0 * static_cast<double>(n);
        const double cn = c[n];
        for (std::size_t b = 0; b < m; ++b) {
          const double h_next = x2[b] * h_cur[b] - two_n * h_prev[b];
          v[b] += cn * h_cur[b];
          s[b] += cn * h_next;
          h_prev[b] = h_cur[b];
          h_cur[b] = h_next;
        }
      }
      for (std::size_t b = 0; b < m; ++b) {
        value[j0 + b] += v[b];
        slope[j0 + b] += s[b];
      }
    }
  }
  for (std::size_t j = 0; j < t.size(); ++j) {
    value[j] *= norm;
    slope[j] *= -norm / delta_;
  }
}

void GaussTransform1D::evaluate_direct(std::span<const double> t, std::span<double> value,
                                       std::span<double> slope) const {
  const double norm = 1.0 / (std::sqrt(2.0 * kPi * variance_) * static_cast<double>(sources_.size()));
  const double inv_var = 1.0 / variance_;
  for (std::size_t j = 0; j < t.size(); ++j) {
    double v = 0.0;
    double s = 0.0;
    for (double a : sources_) {
      const double diff = t[j] - a;
      const double k = std::exp(-0.5 * diff * diff * inv_var);
      v += k;
      s -= k * diff * inv_var;
    }
    value[j] = v * norm;
    slope[j] = s * norm;
  }
}

}  // namespace dlcluster
