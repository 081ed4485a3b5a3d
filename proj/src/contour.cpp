#include "bifurc/contour.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace bifurc {

namespace {

// a crossing point sits on a grid edge: axis 0 = between (i,j) and (i+1,j),
// axis 1 = between (i,j) and (i,j+1)
struct EdgeId {
  int axis, i, j;
  bool operator<(const EdgeId& o) const {
    if (axis != o.axis) return axis < o.axis;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
  bool operator==(const EdgeId& o) const { return axis == o.axis && i == o.i && j == o.j; }
};

Eigen::Vector2d edge_point(const ContourGrid& grid, double level, const EdgeId& e) {
  const auto& v = grid.values;
  double va, vb;
  Eigen::Vector2d pa, pb;
  if (e.axis == 0) {
    va = v(e.i, e.j);
    vb = v(e.i + 1, e.j);
    pa = {grid.xs[e.i], grid.ys[e.j]};
    pb = {grid.xs[e.i + 1], grid.ys[e.j]};
  } else {
    va = v(e.i, e.j);
    vb = v(e.i, e.j + 1);
    pa = {grid.xs[e.i], grid.ys[e.j]};
    pb = {grid.xs[e.i], grid.ys[e.j + 1]};
  }
  const double t = va == vb ? 0.5 : (level - va) / (vb - va);
  return pa + std::clamp(t, 0.0, 1.0) * (pb - pa);
}

}  // namespace

std::vector<Polyline> marching_squares(const ContourGrid& grid, double level) {
  const int nx = static_cast<int>(grid.xs.size());
  const int ny = static_cast<int>(grid.ys.size());
  if (nx < 2 || ny < 2 || grid.values.rows() != nx || grid.values.cols() != ny)
    throw std::invalid_argument("marching_squares: inconsistent grid");

  std::vector<std::pair<EdgeId, EdgeId>> segments;
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      const bool s00 = grid.values(i, j) > level;
      const bool s10 = grid.values(i + 1, j) > level;
      const bool s01 = grid.values(i, j + 1) > level;
      const bool s11 = grid.values(i + 1, j + 1) > level;
      const int pattern = (s00 ? 1 : 0) | (s10 ? 2 : 0) | (s11 ? 4 : 0) | (s01 ? 8 : 0);
      if (pattern == 0 || pattern == 15) continue;

      const EdgeId bottom{0, i, j}, top{0, i, j + 1}, left{1, i, j}, right{1, i + 1, j};
      auto emit = [&](EdgeId a, EdgeId b) { segments.emplace_back(a, b); };
      switch (pattern) {
        case 1: case 14: emit(left, bottom); break;
        case 2: case 13: emit(bottom, right); break;
        case 3: case 12: emit(left, right); break;
        case 4: case 11: emit(right, top); break;
        case 6: case 9:  emit(bottom, top); break;
        case 7: case 8:  emit(left, top); break;
        case 5: case 10: {
          // saddle: split by the cell-center average
          const double center = 0.25 * (grid.values(i, j) + grid.values(i + 1, j) +
                                        grid.values(i, j + 1) + grid.values(i + 1, j + 1));
          const bool center_high = center > level;
          if ((pattern == 5) == center_high) {
            emit(left, top);
            emit(bottom, right);
          } else {
            emit(left, bottom);
            emit(right, top);
          }
          break;
        }
        default: break;
      }
    }
  }

  // chain segments by shared edges
  std::multimap<EdgeId, size_t> incidence;
  for (size_t s = 0; s < segments.size(); ++s) {
    incidence.emplace(segments[s].first, s);
    incidence.emplace(segments[s].second, s);
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> curves;

  auto walk = [&](size_t start, bool from_first) {
    std::vector<EdgeId> chain;
    size_t seg = start;
    EdgeId at = from_first ? segments[seg].first : segments[seg].second;
    chain.push_back(at);
    while (true) {
      used[seg] = true;
      at = segments[seg].first == at ? segments[seg].second : segments[seg].first;
      chain.push_back(at);
      size_t next = segments.size();
      auto [lo, hi] = incidence.equal_range(at);
      for (auto it = lo; it != hi; ++it)
        if (!used[it->second]) next = it->second;
      if (next == segments.size()) break;
      seg = next;
    }
    Polyline poly;
    poly.reserve(chain.size());
    for (const EdgeId& e : chain) poly.push_back(edge_point(grid, level, e));
    return poly;
  };

  // open chains first (endpoints of odd incidence), then remaining loops
  for (size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    const bool first_open = incidence.count(segments[s].first) == 1;
    const bool second_open = incidence.count(segments[s].second) == 1;
    if (first_open || second_open) curves.push_back(walk(s, first_open));
  }
  for (size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) curves.push_back(walk(s, true));
  return curves;
}

std::string render_svg(const std::vector<Polyline>& curves, double width, double height,
                       int pixel_size) {
  const double scale = pixel_size / std::max(width, height);
  const double w = width * scale, h = height * scale;
  char buf[160];
  std::string svg;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.9g\" height=\"%.9g\" "
                "viewBox=\"0 0 %.9g %.9g\">\n",
                w, h, w, h);
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<rect x=\"0\" y=\"0\" width=\"%.9g\" height=\"%.9g\" fill=\"white\" "
                "stroke=\"black\"/>\n",
                w, h);
  svg += buf;
  for (const auto& poly : curves) {
    svg += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < poly.size(); ++i) {
      // SVG y grows downward
      std::snprintf(buf, sizeof buf, "%s%.9g,%.9g", i ? " " : "", poly[i][0] * scale,
                    h - poly[i][1] * scale);
      svg += buf;
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string grid_csv(const ContourGrid& grid) {
  std::string csv = "x,y,value\n";
  char buf[96];
  for (int i = 0; i < grid.xs.size(); ++i)
    for (int j = 0; j < grid.ys.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.xs[i], grid.ys[j],
                    grid.values(i, j));
      csv += buf;
    }
  return csv;
}

}  // namespace bifurc
