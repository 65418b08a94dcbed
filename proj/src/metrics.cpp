#include "dlcluster/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace dlcluster {

namespace {

std::map<int, std::size_t> compact(const Labels& labels) {
  std::map<int, std::size_t> index;
  for (int l : labels) index.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, slot] : index) slot = next++;
  return index;
}

double choose2(std::int64_t m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); }

double entropy(const std::vector<std::int64_t>& sums, double n) {
  double h = 0.0;
  for (std::int64_t s : sums) {
    if (s > 0) {
      const double p = static_cast<double>(s) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

ContingencyTable contingency(const Labels& truth, const Labels& pred) {
  if (truth.size() != pred.size()) {
    throw std::invalid_argument("metrics: label lengths differ (" + std::to_string(truth.size()) + " vs " +
                                std::to_string(pred.size()) + ")");
  }
  if (truth.size() < 2) throw std::invalid_argument("metrics: need at least 2 labels");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || pred[i] < 0) throw std::invalid_argument("metrics: labels must be non-negative");
  }
  const auto rows = compact(truth);
  const auto cols = compact(pred);
  ContingencyTable t;
  t.counts.assign(rows.size(), std::vector<std::int64_t>(cols.size(), 0));
  t.row_sums.assign(rows.size(), 0);
  t.col_sums.assign(cols.size(), 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t r = rows.at(truth[i]);
    const std::size_t c = cols.at(pred[i]);
    ++t.counts[r][c];
    ++t.row_sums[r];
    ++t.col_sums[c];
  }
  t.n = static_cast<std::int64_t>(truth.size());
  return t;
}

double ari(const Labels& truth, const Labels& pred) {
  const ContingencyTable t = contingency(truth, pred);
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& row : t.counts) {
    for (std::int64_t c : row) index += choose2(c);
  }
  for (std::int64_t a : t.row_sums) sum_a += choose2(a);
  for (std::int64_t b : t.col_sums) sum_b += choose2(b);
  const double expected = sum_a * sum_b / choose2(t.n);
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  // Both partitions trivial (all-one-cluster or all-singletons): they agree.
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double nmi(const Labels& truth, const Labels& pred) {
  const ContingencyTable t = contingency(truth, pred);
  const double n = static_cast<double>(t.n);
  const double hu = entropy(t.row_sums, n);
  const double hv = entropy(t.col_sums, n);
  if (hu + hv == 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t r = 0; r < t.counts.size(); ++r) {
    for (std::size_t c = 0; c < t.counts[r].size(); ++c) {
      const std::int64_t nij = t.counts[r][c];
      if (nij == 0) continue;
      const double pij = static_cast<double>(nij) / n;
      mi += pij * std::log(static_cast<double>(nij) * n /
                           (static_cast<double>(t.row_sums[r]) * static_cast<double>(t.col_sums[c])));
    }
  }
  return std::clamp(2.0 * mi / (hu + hv), 0.0, 1.0);
}

double acc(const Labels& truth, const Labels& pred) {
  const ContingencyTable t = contingency(truth, pred);
  const std::size_t r = t.row_sums.size();
  const std::size_t c = t.col_sums.size();
  const std::size_t size = std::max(r, c);
  // Rows are predicted clusters, columns true classes; padding costs nothing.
  Matrix cost = Matrix::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = -static_cast<double>(t.counts[i][j]);
    }
  }
  const std::vector<std::size_t> match = hungarian(cost);
  std::int64_t hits = 0;
  for (std::size_t p = 0; p < c; ++p) {
    if (match[p] < r) hits += t.counts[match[p]][p];
  }
  return static_cast<double>(hits) / static_cast<double>(t.n);
}

std::vector<std::size_t> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw std::invalid_argument("hungarian: cost matrix must be square");
  if (!cost.allFinite()) throw std::invalid_argument("hungarian: cost entries must be finite");
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  if (n == 0) return {};
  // Shortest augmenting path with row/column potentials (1-based internally).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_to(n + 1);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t col = 0;
    std::fill(min_to.begin(), min_to.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[col] = true;
      const std::size_t row = row_of[col];
      double delta = inf;
      std::size_t next = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced =
            cost(static_cast<Eigen::Index>(row - 1), static_cast<Eigen::Index>(j - 1)) - u[row] - v[j];
        if (reduced < min_to[j]) {
          min_to[j] = reduced;
          way[j] = col;
        }
        if (min_to[j] < delta) {
          delta = min_to[j];
          next = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_to[j] -= delta;
        }
      }
      col = next;
    } while (row_of[col] != 0);
    do {
      const std::size_t prev = way[col];
      row_of[col] = row_of[prev];
      col = prev;
    } while (col != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[row_of[j] - 1] = j - 1;
  return assignment;
}

std::size_t count_distinct(const Labels& labels) { return std::set<int>(labels.begin(), labels.end()).size(); }

}  // namespace dlcluster
