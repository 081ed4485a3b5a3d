// Dirichlet-Laplacian eigenpairs on N-dimensional boxes: exact spectra,
// degeneracy grouping and pointwise eigenfunction evaluation.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bifurc/rational.hpp"

namespace bifurc {

/// Box (0,L_1) x ... x (0,L_N). Squared side lengths are exact rationals,
/// optionally in units of pi^2 (pi_scaled), so that eigenvalue coincidences
/// are decided exactly. The eigenvalue of mode k is pi^2 * sum k_j^2 / L_j^2;
/// its "rational part" sum k_j^2 / lengths_sq[j] is shared by all modes of a
/// degenerate group and is the exact grouping key.
struct BoxDomain {
  int dim = 0;
  std::vector<Rational> lengths_sq;  // L_j^2, or L_j^2 / pi^2 when pi_scaled
  bool pi_scaled = false;
  Eigen::VectorXd lengths;           // actual side lengths L_j

  static BoxDomain create(std::vector<Rational> lengths_sq, bool pi_scaled);
  double volume() const { return lengths.prod(); }
  /// prod_j sqrt(2/L_j): the L2 normalization factor of every sine mode.
  double norm_constant() const;
};

/// Frequency multi-index; all entries >= 1.
struct Mode {
  Eigen::VectorXi k;
  Mode() = default;
  explicit Mode(Eigen::VectorXi kk) : k(std::move(kk)) {}
  Mode(std::initializer_list<int> kk);
};

bool lex_less(const Mode& a, const Mode& b);

/// An eigenvalue with its full multiplicity-p mode list (lexicographically
/// sorted) and the shared normalization constant.
struct EigenGroup {
  double eigenvalue = 0;       // pi^2 sum k_j^2 / L_j^2
  Rational rational_part;      // sum k_j^2 / lengths_sq[j], exact grouping key
  std::vector<Mode> modes;
  double norm_constant = 0;
  int multiplicity() const { return static_cast<int>(modes.size()); }
};

/// Exact rational part of the eigenvalue of `mode`.
Rational eigenvalue_rational(const Mode& mode, const BoxDomain& box);

/// Eigenvalue pi^2 sum k_j^2/L_j^2 (equals the rational part for pi-scaled boxes).
double eigenvalue_of(const Mode& mode, const BoxDomain& box);

/// All eigenvalue groups with eigenvalue <= max_eigenvalue, sorted ascending,
/// modes within a group sorted lexicographically. Grouping is exact.
std::vector<EigenGroup> enumerate_groups(const BoxDomain& box, double max_eigenvalue);

/// L2-normalized eigenfunction value at a point of the closed box.
double eval_eigenfunction(const Mode& mode, const BoxDomain& box, const Eigen::VectorXd& point);

}  // namespace bifurc
