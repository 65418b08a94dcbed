#include "dlcluster/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dlcluster/numerics.hpp"

namespace dlcluster {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 40.0;
constexpr double kPlotRight = 470.0;  // scatter area ends here; legend and pie sit to the right
constexpr double kPieRadius = 55.0;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string color_for(std::size_t index) {
  constexpr std::size_t base = std::size(kPalette);
  if (index < base) return kPalette[index];
  // Golden-angle hues beyond the fixed palette.
  const double hue = std::fmod(static_cast<double>(index) * 137.508, 360.0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "hsl(%.1f,65%%,50%%)", hue);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_scatter_svg(const Dataset& data, const Labels& labels) {
  if (data.dim() != 2) {
    throw std::invalid_argument("plot: data must be 2-D, got d=" + std::to_string(data.dim()));
  }
  if (labels.size() != data.size()) {
    throw std::invalid_argument("plot: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(data.size()) + " points");
  }
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::map<int, std::size_t> slot;
  for (const auto& [label, count] : counts) slot.emplace(label, slot.size());

  const Matrix& x = data.points();
  double x_lo = x.col(0).minCoeff(), x_hi = x.col(0).maxCoeff();
  double y_lo = x.col(1).minCoeff(), y_hi = x.col(1).maxCoeff();
  if (x_hi - x_lo <= 0.0) { x_lo -= 1.0; x_hi += 1.0; }
  if (y_hi - y_lo <= 0.0) { y_lo -= 1.0; y_hi += 1.0; }
  const auto sx = [&](double v) { return kMargin + (v - x_lo) / (x_hi - x_lo) * (kPlotRight - kMargin); };
  const auto sy = [&](double v) { return kHeight - kMargin - (v - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kPlotRight - kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#333\"/>\n";

  svg << "<g class=\"points\">\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    svg << "<circle cx=\"" << num(sx(x(r, 0))) << "\" cy=\"" << num(sy(x(r, 1))) << "\" r=\"2\" fill=\""
        << color_for(slot.at(labels[i])) << "\" fill-opacity=\"0.7\"/>\n";
  }
  svg << "</g>\n";

  const double legend_x = kPlotRight + 20.0;
  svg << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double y = kMargin + 10.0;
  for (const auto& [label, count] : counts) {
    svg << "<rect x=\"" << legend_x << "\" y=\"" << num(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << color_for(slot.at(label)) << "\"/>";
    svg << "<text x=\"" << legend_x + 16 << "\" y=\"" << num(y) << "\">cluster " << label << " (" << count
        << ")</text>\n";
    y += 18.0;
  }
  svg << "</g>\n";

  const double cx = kPlotRight + 20.0 + kPieRadius;
  const double cy = kHeight - kMargin - kPieRadius;
  const double n = static_cast<double>(data.size());
  svg << "<g class=\"pie\">\n";
  if (counts.size() == 1) {
    svg << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << kPieRadius << "\" fill=\""
        << color_for(0) << "\"/>\n";
  } else {
    double angle = -kPi / 2.0;
    for (const auto& [label, count] : counts) {
      const double sweep = 2.0 * kPi * static_cast<double>(count) / n;
      const double end = angle + sweep;
      svg << "<path d=\"M" << num(cx) << ',' << num(cy) << " L" << num(cx + kPieRadius * std::cos(angle)) << ','
          << num(cy + kPieRadius * std::sin(angle)) << " A" << kPieRadius << ',' << kPieRadius << " 0 "
          << (sweep > kPi ? 1 : 0) << " 1 " << num(cx + kPieRadius * std::cos(end)) << ','
          << num(cy + kPieRadius * std::sin(end)) << " Z\" fill=\"" << color_for(slot.at(label))
          << "\" stroke=\"white\"/>\n";
      angle = end;
    }
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace dlcluster
