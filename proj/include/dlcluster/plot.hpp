#pragma once

#include <string>

#include "dlcluster/dataset.hpp"

namespace dlcluster {

/// SVG scatter of 2-D data, one fill color per cluster, with a legend and a
/// pie inset of cluster proportions. Throws unless d == 2 and the label count matches.
std::string render_scatter_svg(const Dataset& data, const Labels& labels);

}  // namespace dlcluster
