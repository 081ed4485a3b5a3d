#include "bifurc/galerkin.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bifurc/errors.hpp"
#include "bifurc/moments.hpp"

namespace bifurc {

namespace {
constexpr double kPi = std::numbers::pi;
}

GalerkinSpace::GalerkinSpace(const BoxDomain& box, const EigenGroup& group, int cutoff,
                             int oversample)
    : box_(box), group_(group), cutoff_(cutoff) {
  if (cutoff < 1) throw ConfigError("GalerkinSpace: cutoff must be >= 1");
  if (oversample < 2) throw ConfigError("GalerkinSpace: oversample must be >= 2");
  for (const auto& m : group.modes)
    if (m.k.maxCoeff() > cutoff)
      throw ConfigError("GalerkinSpace: group mode outside the truncation cutoff");

  const int dim = box.dim;
  points_per_axis_ = oversample * cutoff;
  n_modes_ = 1;
  n_values_ = 1;
  for (int j = 0; j < dim; ++j) {
    n_modes_ *= cutoff_;
    n_values_ *= points_per_axis_;
  }

  // flattened eigenvalues and the kernel-mode index set
  eigenvalues_.resize(n_modes_);
  Eigen::VectorXi k = Eigen::VectorXi::Ones(dim);
  for (long idx = 0; idx < n_modes_; ++idx) {
    double lam = 0;
    long check = 0;
    for (int j = 0; j < dim; ++j) {
      lam += kPi * kPi * k[j] * k[j] / (box.lengths[j] * box.lengths[j]);
      check = check * cutoff_ + (k[j] - 1);
    }
    eigenvalues_[check] = lam;
    int axis = dim - 1;
    while (axis >= 0) {
      if (++k[axis] <= cutoff_) break;
      k[axis] = 1;
      --axis;
    }
    (void)axis;
  }
  for (const auto& m : group.modes) {
    long flat = 0;
    for (int j = 0; j < dim; ++j) flat = flat * cutoff_ + (m.k[j] - 1);
    group_flat_.push_back(flat);
  }

  gap_ = std::numeric_limits<double>::infinity();
  for (long idx = 0; idx < n_modes_; ++idx) {
    const bool in_group =
        std::find(group_flat_.begin(), group_flat_.end(), idx) != group_flat_.end();
    if (!in_group) gap_ = std::min(gap_, std::abs(eigenvalues_[idx] - group_.eigenvalue));
  }

  // exact pair on the uniform interior grid:
  //   synthesis S[i][k] = sqrt(2/L) sin(k pi x_i / L),  x_i = i L/(n+1)
  //   analysis  A = (L/(n+1)) S^T
  synthesis_.resize(dim);
  analysis_.resize(dim);
  for (int j = 0; j < dim; ++j) {
    const double L = box.lengths[j];
    const int n = points_per_axis_;
    Eigen::MatrixXd syn(n, cutoff_);
    for (int i = 0; i < n; ++i) {
      const double x = (i + 1) * L / (n + 1);
      for (int kk = 1; kk <= cutoff_; ++kk)
        syn(i, kk - 1) = std::sqrt(2.0 / L) * std::sin(kk * kPi * x / L);
    }
    synthesis_[j] = syn.cast<cdouble>();
    analysis_[j] = (L / (n + 1) * syn.transpose()).cast<cdouble>();
  }
}

Eigen::VectorXcd GalerkinSpace::apply_axis_transforms(const Eigen::VectorXcd& input,
                                                      const std::vector<Eigen::MatrixXcd>& mats,
                                                      long in_axis_dim, long out_axis_dim) const {
  const int dim = box_.dim;
  Eigen::VectorXcd current = input;
  // dims start as (in, in, ..., in) and are converted axis by axis
  std::vector<long> dims(dim, in_axis_dim);
  for (int axis = 0; axis < dim; ++axis) {
    long pre = 1, post = 1;
    for (int j = 0; j < axis; ++j) pre *= dims[j];
    for (int j = axis + 1; j < dim; ++j) post *= dims[j];
    Eigen::VectorXcd next(pre * out_axis_dim * post);
    using RowMat = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    for (long p = 0; p < pre; ++p) {
      Eigen::Map<const RowMat> in_slice(current.data() + p * in_axis_dim * post, in_axis_dim, post);
      Eigen::Map<RowMat> out_slice(next.data() + p * out_axis_dim * post, out_axis_dim, post);
      out_slice = mats[axis] * in_slice;
    }
    current.swap(next);
    dims[axis] = out_axis_dim;
  }
  return current;
}

Eigen::VectorXcd GalerkinSpace::to_values(const Eigen::VectorXcd& coeffs) const {
  return apply_axis_transforms(coeffs, synthesis_, cutoff_, points_per_axis_);
}

Eigen::VectorXcd GalerkinSpace::to_coeffs(const Eigen::VectorXcd& values) const {
  return apply_axis_transforms(values, analysis_, points_per_axis_, cutoff_);
}

Eigen::VectorXcd GalerkinSpace::nonlinear_coeffs(const Eigen::VectorXcd& coeffs,
                                                 double sigma) const {
  Eigen::VectorXcd values = to_values(coeffs);
  for (long q = 0; q < values.size(); ++q) values[q] = nonlinearity(values[q], sigma);
  return to_coeffs(values);
}

Eigen::VectorXcd GalerkinSpace::embed_group(const Eigen::VectorXcd& group_coeffs) const {
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(n_modes_);
  for (size_t i = 0; i < group_flat_.size(); ++i) full[group_flat_[i]] = group_coeffs[i];
  return full;
}

Eigen::VectorXcd GalerkinSpace::extract_group(const Eigen::VectorXcd& coeffs) const {
  Eigen::VectorXcd out(group_flat_.size());
  for (size_t i = 0; i < group_flat_.size(); ++i) out[i] = coeffs[group_flat_[i]];
  return out;
}

void GalerkinSpace::project_complement(Eigen::VectorXcd& coeffs) const {
  for (long idx : group_flat_) coeffs[idx] = 0.0;
}

double GalerkinSpace::sup_norm(const Eigen::VectorXcd& coeffs) const {
  return to_values(coeffs).cwiseAbs().maxCoeff();
}

double GalerkinSpace::h1_norm(const Eigen::VectorXcd& coeffs) const {
  return std::sqrt((eigenvalues_.array() * coeffs.array().abs2()).sum());
}

}  // namespace bifurc
