#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rislab {

struct PlotSeries {
  std::string label;
  std::vector<double> mean;
  std::vector<double> half_width;  // empty means no band
};

struct PlotOptions {
  std::string title;
  std::string x_label = "step";
  std::string y_label = "sum rate";
  int width = 800;
  int height = 500;
  std::size_t max_points = 1000;  // curves are decimated to at most this many vertices
};

/// Self-contained SVG with one polyline per series and a shaded band of
/// mean +/- half_width. Throws DomainError on empty input and ShapeError on
/// series of unequal length.
void write_svg(std::ostream& out, const std::vector<PlotSeries>& series, const PlotOptions& opts = {});

}  // namespace rislab
