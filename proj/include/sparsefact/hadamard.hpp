#pragma once

#include "sparsefact/types.hpp"

namespace sparsefact {

// Dense Walsh-Hadamard matrix of order n (n a power of two, n >= 1), built by
// the doubling recursion H_{2m} = [[H, H], [H, -H]].  Entries are exactly +-1.
Matrix hadamard(Index n);

// Reference butterfly factorization of hadamard(n) into log2(n) sparse
// factors, coarsest stride first: factor j is I_{2^j} (x) H_2 (x) I_{n/2^{j+1}}.
// Each factor has exactly 2 nonzeros per row and per column (entries +-1), so
// applying the chain costs 2*n*log2(n) multiply-adds, and the product equals
// hadamard(n) exactly in integer arithmetic.
struct ButterflyFactorization {
  Index n = 0;
  std::vector<CooMatrix> factors;
};

ButterflyFactorization hadamard_butterfly(Index n);

MultiLayerOperator to_operator(const ButterflyFactorization& bf);

}  // namespace sparsefact
