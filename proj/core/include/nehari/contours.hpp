#pragma once

// Level curves of grid fields by marching squares over interior cells.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nehari/grid.hpp"

namespace nehari {

struct Polyline {
  double level = 0.0;
  bool closed = false;
  std::vector<std::pair<double, double>> points;
};

/// Marching squares over every lattice cell whose four corners are interior
/// nodes. A corner counts as above the level when its value is strictly
/// greater. Saddle cells are resolved by comparing the mean of the four
/// corners with the level. Output order is deterministic.
std::vector<Polyline> extract_contours(const Field& u, const std::vector<double>& levels);

/// Columns level,polyline,x,y, one row per point.
void write_contours_csv(std::ostream& os, const std::vector<Polyline>& lines);

/// Standalone SVG showing the domain outline and the curves; positive levels
/// are drawn in red, negative in blue, zero in black.
std::string contours_svg(const Grid& grid, const std::vector<Polyline>& lines,
                         const std::string& title = {});

}  // namespace nehari
