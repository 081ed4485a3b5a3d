#include "bifurc/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace bifurc {

namespace {

// Legendre P_n(x) and derivative by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }

  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);
  rule.nodes = es.eigenvalues();

  // Newton polish and weights w = 2 / ((1 - x^2) P_n'(x)^2).
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = legendre_pair(n, x);
      x -= p / dp;
    }
    const auto [p, dp] = legendre_pair(n, x);
    (void)p;
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureGrid QuadratureGrid::tensor(const BoxDomain& box, int nodes_per_axis) {
  const QuadratureRule rule = gauss_legendre(nodes_per_axis);
  QuadratureGrid grid;
  grid.nodes.resize(box.dim);
  grid.weights.resize(box.dim);
  for (int j = 0; j < box.dim; ++j) {
    const double L = box.lengths[j];
    grid.nodes[j] = (rule.nodes.array() + 1.0) * (L / 2.0);
    grid.weights[j] = rule.weights * (L / 2.0);
  }
  return grid;
}

int default_nodes_per_axis(int dim, double sigma) {
  int n = dim <= 2 ? 64 : (dim == 3 ? 32 : 16);
  const bool even_sigma = sigma == std::round(sigma) && static_cast<long>(std::llround(sigma)) % 2 == 0;
  if (!even_sigma) n *= 2;
  return n;
}

}  // namespace bifurc
