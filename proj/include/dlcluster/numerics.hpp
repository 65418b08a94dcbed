#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace dlcluster {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One step of the splitmix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/**
 * Seeded xoshiro256** generator.
 *
 * Owns its state; not safe to share between threads. Use derive() to obtain
 * independent child streams for parallel work.
 */
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Child generator whose stream depends on (seed, stream) only.
  Rng derive(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// A point on the unit (d-1)-sphere.
class UnitVector {
 public:
  /// Normalizes `components`; throws if the norm is zero or non-finite.
  static UnitVector normalized(Vector components);

  std::size_t dim() const { return static_cast<std::size_t>(components_.size()); }
  const Vector& components() const { return components_; }
  double operator[](std::size_t j) const { return components_[static_cast<Eigen::Index>(j)]; }

 private:
  explicit UnitVector(Vector components) : components_(std::move(components)) {}
  Vector components_;
};

UnitVector sample_unit_vector(Rng& rng, std::size_t d);

/// g equally spaced points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t g);

/// Worker cap from DLCLUSTER_THREADS, else hardware concurrency (at least 1).
std::size_t worker_threads();

/// Runs fn(i) for i in [0, n), split into contiguous chunks across workers.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(worker_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (std::size_t i = 0; i < std::min(n, chunk); ++i) fn(i);
}

/// log(sum(exp(values))), -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogTwoPi = 1.83787706640934548356;

}  // namespace dlcluster
