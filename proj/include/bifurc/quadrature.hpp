// Gauss-Legendre rules and tensor-product grids on boxes.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bifurc/box.hpp"

namespace bifurc {

struct QuadratureRule {
  Eigen::VectorXd nodes;    // on (-1, 1), ascending
  Eigen::VectorXd weights;  // sum to 2
};

/// n-point Gauss-Legendre rule (Golub-Welsch eigenvalues, Newton-polished).
QuadratureRule gauss_legendre(int n);

/// Tensor grid over a box: per-axis nodes mapped to (0, L_j) with matching
/// weights. Nodes are strictly interior; per-axis weights sum to L_j.
struct QuadratureGrid {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<Eigen::VectorXd> weights;

  static QuadratureGrid tensor(const BoxDomain& box, int nodes_per_axis);

  int axes() const { return static_cast<int>(nodes.size()); }
  long points() const {
    long p = 1;
    for (const auto& n : nodes) p *= n.size();
    return p;
  }
};

/// Spec default node count per axis by dimension (doubled for non-even sigma
/// where |u|^sigma u is only C^1).
int default_nodes_per_axis(int dim, double sigma);

}  // namespace bifurc
