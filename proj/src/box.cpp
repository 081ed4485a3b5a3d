#include "bifurc/box.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace bifurc {

namespace {
constexpr double kPi = std::numbers::pi;
}

BoxDomain BoxDomain::create(std::vector<Rational> lengths_sq, bool pi_scaled) {
  BoxDomain box;
  box.dim = static_cast<int>(lengths_sq.size());
  if (box.dim < 1) throw std::invalid_argument("BoxDomain: dim must be >= 1");
  for (const auto& r : lengths_sq)
    if (!(Rational(0) < r)) throw std::invalid_argument("BoxDomain: lengths_sq entries must be > 0");
  box.lengths_sq = std::move(lengths_sq);
  box.pi_scaled = pi_scaled;
  box.lengths.resize(box.dim);
  const double scale = pi_scaled ? kPi : 1.0;
  for (int j = 0; j < box.dim; ++j)
    box.lengths[j] = scale * std::sqrt(box.lengths_sq[j].to_double());
  return box;
}

double BoxDomain::norm_constant() const {
  double c = 1.0;
  for (int j = 0; j < dim; ++j) c *= std::sqrt(2.0 / lengths[j]);
  return c;
}

Mode::Mode(std::initializer_list<int> kk) : k(static_cast<int>(kk.size())) {
  int i = 0;
  for (int v : kk) k[i++] = v;
}

bool lex_less(const Mode& a, const Mode& b) {
  return std::lexicographical_compare(a.k.begin(), a.k.end(), b.k.begin(), b.k.end());
}

Rational eigenvalue_rational(const Mode& mode, const BoxDomain& box) {
  if (mode.k.size() != box.dim)
    throw std::invalid_argument("eigenvalue_rational: mode/box dimension mismatch");
  Rational sum(0);
  for (int j = 0; j < box.dim; ++j) {
    if (mode.k[j] < 1) throw std::invalid_argument("eigenvalue_rational: mode entries must be >= 1");
    const std::int64_t k2 = static_cast<std::int64_t>(mode.k[j]) * mode.k[j];
    sum = sum + Rational(k2) * box.lengths_sq[j].inverse();
  }
  return sum;
}

double eigenvalue_of(const Mode& mode, const BoxDomain& box) {
  const Rational r = eigenvalue_rational(mode, box);
  return box.pi_scaled ? r.to_double() : kPi * kPi * r.to_double();
}

std::vector<EigenGroup> enumerate_groups(const BoxDomain& box, double max_eigenvalue) {
  // Per-axis frequency bound: k_j^2 / lengths_sq[j] <= max rational part.
  const double max_rational =
      box.pi_scaled ? max_eigenvalue : max_eigenvalue / (kPi * kPi);
  if (max_rational <= 0) return {};

  std::vector<int> kmax(box.dim);
  for (int j = 0; j < box.dim; ++j) {
    kmax[j] = static_cast<int>(std::floor(std::sqrt(max_rational * box.lengths_sq[j].to_double()) + 1e-9));
    if (kmax[j] < 1) return {};
  }

  std::map<Rational, std::vector<Mode>> groups;
  Eigen::VectorXi k = Eigen::VectorXi::Ones(box.dim);
  while (true) {
    Mode m(k);
    const Rational r = eigenvalue_rational(m, box);
    // the bound itself is floating; grouping below stays exact
    if (r.to_double() <= max_rational * (1 + 1e-14) + 1e-14) groups[r].push_back(m);
    // advance multi-index
    int axis = box.dim - 1;
    while (axis >= 0) {
      if (++k[axis] <= kmax[axis]) break;
      k[axis] = 1;
      --axis;
    }
    if (axis < 0) break;
  }

  std::vector<EigenGroup> out;
  out.reserve(groups.size());
  for (auto& [r, modes] : groups) {
    EigenGroup g;
    g.rational_part = r;
    g.eigenvalue = box.pi_scaled ? r.to_double() : kPi * kPi * r.to_double();
    std::sort(modes.begin(), modes.end(), lex_less);
    g.modes = std::move(modes);
    g.norm_constant = box.norm_constant();
    out.push_back(std::move(g));
  }
  return out;
}

double eval_eigenfunction(const Mode& mode, const BoxDomain& box, const Eigen::VectorXd& point) {
  if (mode.k.size() != box.dim || point.size() != box.dim)
    throw std::invalid_argument("eval_eigenfunction: dimension mismatch");
  double v = box.norm_constant();
  for (int j = 0; j < box.dim; ++j) {
    const double L = box.lengths[j];
    if (point[j] < -1e-14 || point[j] > L * (1 + 1e-14))
      throw std::domain_error("eval_eigenfunction: point outside domain");
    v *= std::sin(mode.k[j] * kPi * point[j] / L);
  }
  return v;
}

}  // namespace bifurc
