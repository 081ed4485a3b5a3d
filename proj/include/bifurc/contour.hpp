// Zero-level curve extraction by marching squares with linear interpolation,
// with SVG and CSV emission.
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bifurc {

struct ContourGrid {
  Eigen::VectorXd xs;      // ascending sample coordinates
  Eigen::VectorXd ys;
  Eigen::MatrixXd values;  // values(i, j) at (xs[i], ys[j])
};

using Polyline = std::vector<Eigen::Vector2d>;

/// Zero-level curves of the grid; segments are chained into polylines by
/// shared edge endpoints. Saddle cells are disambiguated by the cell average.
std::vector<Polyline> marching_squares(const ContourGrid& grid, double level = 0.0);

/// SVG document with the domain rectangle and the curves; coordinates are
/// written with 9 significant digits.
std::string render_svg(const std::vector<Polyline>& curves, double width, double height,
                       int pixel_size = 512);

/// CSV dump of the raw grid: header x,y,value then one row per sample.
std::string grid_csv(const ContourGrid& grid);

}  // namespace bifurc
