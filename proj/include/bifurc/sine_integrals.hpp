// Closed-form integrals of products of sine modes over boxes, the quartic
// table A/B, and the vanishing hypothesis on four distinct eigenfunctions.
#pragma once

#include <array>
#include <span>
#include <vector>

#include "bifurc/box.hpp"

namespace bifurc {

/// Exact value of integral_0^L of prod_i sin(f_i pi x / L) dx for an even
/// number of factors, via the product-to-sum expansion: each vanishing signed
/// frequency combination contributes +-L/2^(n-1).
double sine_product_integral(std::span<const int> freqs, double L);

/// integral_0^L sin(k.)sin(l.)sin(m.)sin(n.) dx, frequencies as multiples of pi/L.
double quartic_1d(int k, int l, int m, int n, double L);

/// integral over the box of the product of four eigenfunctions
/// (normalized = true applies the L2 normalization constants).
double quartic_product(const std::array<Mode, 4>& modes, const BoxDomain& box,
                       bool normalized = true);

/// Full p^4 tensor T[i,j,k,l] = integral u_i u_j u_k u_l over the normalized
/// group basis, flattened row-major.
std::vector<double> quartic_tensor(const EigenGroup& group, const BoxDomain& box);

/// The two quartic values entering the sigma=2 reduced system: A = int u^4,
/// B = int u_m^2 u_k^2 (normalized basis), plus flags telling whether they are
/// uniform across the group and whether all mixed quartics vanish.
struct QuarticTable {
  double A = 0;
  double B = 0;          // common pair value when pair_uniform
  bool pair_uniform = true;
  bool cross_ok = true;  // all u_m^2 u_k u_l (k != l) and distinct-4 products vanish
};

QuarticTable make_quartic_table(const EigenGroup& group, const BoxDomain& box);

struct H4Report {
  bool holds = true;
  // indices into group.modes of violating 4-tuples, with the (unnormalized) value
  std::vector<std::pair<std::array<int, 4>, double>> violations;
};

/// Checks that every product of four distinct basis eigenfunctions integrates
/// to zero (exact closed form; |value| < 1e-12 on the unnormalized scale).
/// Vacuously true for p < 4.
H4Report check_hypothesis_H4(const EigenGroup& group, const BoxDomain& box);

}  // namespace bifurc
