#include "bifurc/sine_integrals.hpp"

#include <cmath>
#include <stdexcept>

namespace bifurc {

double sine_product_integral(std::span<const int> freqs, double L) {
  const int n = static_cast<int>(freqs.size());
  if (n == 0) return L;
  if (n % 2 != 0)
    throw std::invalid_argument("sine_product_integral: odd factor counts integrate to values "
                                "outside the closed form implemented here");
  for (int f : freqs)
    if (f < 1) throw std::invalid_argument("sine_product_integral: frequencies must be >= 1");

  // prod sin(f_i t) = (-1)^{n/2} / 2^{n-1} * sum over sign vectors (+1, e_2..e_n)
  // of (prod e_i) cos((f_1 + sum e_i f_i) t); only zero combinations survive
  // the integral, each contributing L.
  long hits = 0;
  const int m = n - 1;
  for (long mask = 0; mask < (1L << m); ++mask) {
    int s = freqs[0];
    int sign = 1;
    for (int i = 0; i < m; ++i) {
      if (mask & (1L << i)) {
        s += freqs[i + 1];
      } else {
        s -= freqs[i + 1];
        sign = -sign;
      }
    }
    if (s == 0) hits += sign;
  }
  const double scale = ((n / 2) % 2 == 0 ? 1.0 : -1.0) / std::pow(2.0, n - 1);
  return scale * L * static_cast<double>(hits);
}

double quartic_1d(int k, int l, int m, int n, double L) {
  const int f[4] = {k, l, m, n};
  return sine_product_integral(std::span<const int>(f, 4), L);
}

double quartic_product(const std::array<Mode, 4>& modes, const BoxDomain& box, bool normalized) {
  for (const auto& mode : modes)
    if (mode.k.size() != box.dim)
      throw std::invalid_argument("quartic_product: mode/box dimension mismatch");
  double v = 1.0;
  for (int j = 0; j < box.dim; ++j) {
    v *= quartic_1d(modes[0].k[j], modes[1].k[j], modes[2].k[j], modes[3].k[j], box.lengths[j]);
    if (v == 0.0) return 0.0;
  }
  if (normalized) {
    const double c = box.norm_constant();
    v *= c * c * c * c;
  }
  return v;
}

std::vector<double> quartic_tensor(const EigenGroup& group, const BoxDomain& box) {
  const int p = group.multiplicity();
  std::vector<double> tensor(static_cast<size_t>(p) * p * p * p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      for (int k = 0; k < p; ++k)
        for (int l = 0; l < p; ++l)
          tensor[((static_cast<size_t>(i) * p + j) * p + k) * p + l] =
              quartic_product({group.modes[i], group.modes[j], group.modes[k], group.modes[l]}, box);
  return tensor;
}

QuarticTable make_quartic_table(const EigenGroup& group, const BoxDomain& box) {
  const int p = group.multiplicity();
  QuarticTable table;
  table.A = quartic_product({group.modes[0], group.modes[0], group.modes[0], group.modes[0]}, box);

  bool have_pair = false;
  for (int m = 0; m < p; ++m) {
    for (int k = 0; k < p; ++k) {
      if (k == m) continue;
      const double b = quartic_product({group.modes[m], group.modes[m], group.modes[k], group.modes[k]}, box);
      if (!have_pair) {
        table.B = b;
        have_pair = true;
      } else if (std::abs(b - table.B) > 1e-12 * (std::abs(table.A) + std::abs(b))) {
        table.pair_uniform = false;
      }
      // three-one pattern u_m^3 u_k must vanish for the closed form
      const double t =
          quartic_product({group.modes[m], group.modes[m], group.modes[m], group.modes[k]}, box);
      if (std::abs(t) > 1e-12 * std::abs(table.A)) table.cross_ok = false;
    }
  }
  // u_m^2 u_k u_l with k != l, and four distinct indices
  for (int m = 0; m < p && table.cross_ok; ++m)
    for (int k = 0; k < p && table.cross_ok; ++k)
      for (int l = k + 1; l < p && table.cross_ok; ++l) {
        if (k == m || l == m) continue;
        const double t =
            quartic_product({group.modes[m], group.modes[m], group.modes[k], group.modes[l]}, box);
        if (std::abs(t) > 1e-12 * std::abs(table.A)) table.cross_ok = false;
      }
  if (table.cross_ok && p >= 4 && !check_hypothesis_H4(group, box).holds) table.cross_ok = false;
  return table;
}

H4Report check_hypothesis_H4(const EigenGroup& group, const BoxDomain& box) {
  H4Report report;
  const int p = group.multiplicity();
  if (p < 4) return report;
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b)
      for (int c = b + 1; c < p; ++c)
        for (int d = c + 1; d < p; ++d) {
          const double v =
              quartic_product({group.modes[a], group.modes[b], group.modes[c], group.modes[d]},
                              box, /*normalized=*/false);
          if (std::abs(v) >= 1e-12) {
            report.holds = false;
            report.violations.push_back({{a, b, c, d}, v});
          }
        }
  return report;
}

}  // namespace bifurc
