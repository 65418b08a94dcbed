#pragma once

#include <cstddef>
#include <vector>

#include "dlcluster/dataset.hpp"
#include "dlcluster/gmm.hpp"
#include "dlcluster/numerics.hpp"

namespace dlcluster {

/// Samples counts[k] points from N(means.row(k), diag(vars.row(k))) for each k,
/// cluster by cluster; labels record the generating component.
Dataset make_blobs(Rng& rng, const std::vector<std::size_t>& counts, const Matrix& means, const Matrix& vars);

/// Ancestral sampling: component by weight, then a diagonal Gaussian draw.
Dataset sample_gmm(Rng& rng, const Gmm& model, std::size_t n);

/// k centers on a ceil(sqrt(k))-wide square lattice with spacing 2*sep,
/// centered on the origin. For k=4 these are (+-sep, +-sep).
Matrix lattice_means(std::size_t k, double sep);

}  // namespace dlcluster
