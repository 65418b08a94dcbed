#include "dlcluster/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dlcluster {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Rejection sampling removes modulo bias.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = max() - (max() % bound + 1) % bound;
  std::uint64_t x = next_u64();
  while (x > limit) x = next_u64();
  return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

Rng Rng::derive(std::uint64_t stream) const {
  std::uint64_t mix = seed_ ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  return Rng(splitmix64(mix));
}

UnitVector UnitVector::normalized(Vector components) {
  const double norm = components.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("UnitVector: components must have finite nonzero norm");
  }
  components /= norm;
  return UnitVector(std::move(components));
}

UnitVector sample_unit_vector(Rng& rng, std::size_t d) {
  if (d == 0) throw std::invalid_argument("sample_unit_vector: dimension must be >= 1");
  Vector v(static_cast<Eigen::Index>(d));
  while (true) {
    for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = rng.normal();
    if (v.norm() >= 1e-12) break;
  }
  return UnitVector::normalized(std::move(v));
}

std::vector<double> linear_grid(double lo, double hi, std::size_t g) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("linear_grid: require finite lo < hi");
  }
  if (g < 2) throw std::invalid_argument("linear_grid: require at least 2 points");
  std::vector<double> grid(g);
  const double step = (hi - lo) / static_cast<double>(g - 1);
  for (std::size_t i = 0; i + 1 < g; ++i) grid[i] = lo + static_cast<double>(i) * step;
  grid[g - 1] = hi;
  return grid;
}

std::size_t worker_threads() {
  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DLCLUSTER_THREADS")) {
    try {
      const long requested = std::stol(env);
      if (requested >= 1) return static_cast<std::size_t>(requested);
    } catch (const std::exception&) {
      // unparsable value: fall back to hardware concurrency
    }
  }
  return hw;
}

double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

}  // namespace dlcluster
