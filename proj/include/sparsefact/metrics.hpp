#pragma once

#include "sparsefact/types.hpp"

#include <cmath>

namespace sparsefact {

// Frobenius inner product <A, B> = sum_ij A_ij B_ij.
template <typename DA, typename DB>
double frobenius_inner(const Eigen::MatrixBase<DA>& a,
                       const Eigen::MatrixBase<DB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("frobenius_inner: shape mismatch");
  return a.cwiseProduct(b).sum();
}

template <typename DA>
double frobenius_norm(const Eigen::MatrixBase<DA>& a) {
  return std::sqrt(frobenius_inner(a, a));
}

// Root mean square entrywise error between a d x n matrix and its
// approximation: ||X - approx||_F / sqrt(d*n).
template <typename DA, typename DB>
double rmse(const Eigen::MatrixBase<DA>& x,
            const Eigen::MatrixBase<DB>& approx) {
  if (x.rows() != approx.rows() || x.cols() != approx.cols())
    throw std::invalid_argument("rmse: shape mismatch");
  const double dn = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
  if (dn == 0.0) throw std::invalid_argument("rmse: empty matrix");
  return frobenius_norm((x - approx).eval()) / std::sqrt(dn);
}

}  // namespace sparsefact
