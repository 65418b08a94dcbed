#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/numerics.hpp"

namespace dlcluster {

/// Counts n_ij of samples with true label i (row) and predicted label j (column).
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t n = 0;
};

/// Distinct labels are compacted in increasing order. Throws on a length
/// mismatch, fewer than two samples, or a negative label.
ContingencyTable contingency(const Labels& truth, const Labels& pred);

double ari(const Labels& truth, const Labels& pred);
/// 2 MI / (H(U) + H(V)) with natural logs; 0 when both entropies vanish.
double nmi(const Labels& truth, const Labels& pred);
/// Best one-to-one cluster-to-class accuracy.
double acc(const Labels& truth, const Labels& pred);

/// Minimum-cost assignment; result[row] = column. Square, finite input only.
std::vector<std::size_t> hungarian(const Matrix& cost);

/// Number of distinct values.
std::size_t count_distinct(const Labels& labels);

}  // namespace dlcluster
