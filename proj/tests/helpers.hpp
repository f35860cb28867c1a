#pragma once

#include "sparsefact/rng.hpp"
#include "sparsefact/types.hpp"

namespace testhelpers {

using sparsefact::CooMatrix;
using sparsefact::Index;
using sparsefact::Matrix;
using sparsefact::Rng;
using sparsefact::Triplet;

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline CooMatrix random_sparse(Index rows, Index cols, Index nnz, Rng& rng) {
  const auto pos = rng.sample_without_replacement(rows * cols, nnz);
  std::vector<Triplet> ts;
  for (Index cell : pos) {
    double v = rng.normal();
    while (v == 0.0) v = rng.normal();
    ts.push_back({cell / cols, cell % cols, v});
  }
  return CooMatrix(rows, cols, std::move(ts));
}

}  // namespace testhelpers
