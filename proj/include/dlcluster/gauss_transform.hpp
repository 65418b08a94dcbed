#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dlcluster {

/**
 * Evaluates f(t) = (1/M) sum_i N(t; a_i, s^2) and f'(t) for M sources sharing
 * one variance.
 *
 * Sources are binned into boxes of width sqrt(2)*s and each box is
 * summarized by a truncated Hermite expansion about its center; the
 * truncation error is below 1e-15 of the box mass. Falls back to direct
 * summation when the expansion would not be cheaper (few sources per box).
 */
class GaussTransform1D {
 public:
  enum class Strategy { automatic, expansion, direct };

  GaussTransform1D(std::span<const double> sources, double variance,
                   Strategy strategy = Strategy::automatic);

  /// Fills value[j] = f(t[j]) and slope[j] = f'(t[j]).
  void evaluate(std::span<const double> t, std::span<double> value, std::span<double> slope) const;

  bool uses_expansion() const { return !boxes_.empty(); }

 private:
  struct Box {
    double center;
    std::vector<double> coeffs;
  };

  void evaluate_direct(std::span<const double> t, std::span<double> value, std::span<double> slope) const;

  std::vector<double> sources_;
  double variance_;
  double delta_;  // sqrt(2) * s
  std::vector<Box> boxes_;
};

}  // namespace dlcluster
