#include "sparsefact/hadamard.hpp"

namespace sparsefact {

namespace {

bool power_of_two(Index n) { return n >= 1 && (n & (n - 1)) == 0; }

}  // namespace

Matrix hadamard(Index n) {
  if (!power_of_two(n))
    throw std::invalid_argument("hadamard: order must be a power of two");
  Matrix h = Matrix::Ones(1, 1);
  for (Index m = 1; m < n; m *= 2) {
    Matrix next(2 * m, 2 * m);
    next.topLeftCorner(m, m) = h;
    next.topRightCorner(m, m) = h;
    next.bottomLeftCorner(m, m) = h;
    next.bottomRightCorner(m, m) = -h;
    h = std::move(next);
  }
  return h;
}

ButterflyFactorization hadamard_butterfly(Index n) {
  if (!power_of_two(n) || n < 2)
    throw std::invalid_argument(
        "hadamard_butterfly: order must be a power of two, at least 2");
  ButterflyFactorization bf;
  bf.n = n;
  for (Index stride = n / 2; stride >= 1; stride /= 2) {
    // I_blocks (x) H_2 (x) I_stride, rows visited in ascending order.
    std::vector<Triplet> ts;
    ts.reserve(static_cast<size_t>(2 * n));
    for (Index base = 0; base < n; base += 2 * stride)
      for (Index s = 0; s < 2; ++s)
        for (Index t = 0; t < stride; ++t) {
          const Index row = base + s * stride + t;
          ts.push_back({row, base + t, 1.0});
          ts.push_back({row, base + stride + t, s ? -1.0 : 1.0});
        }
    bf.factors.emplace_back(n, n, std::move(ts));
  }
  return bf;
}

MultiLayerOperator to_operator(const ButterflyFactorization& bf) {
  MultiLayerOperator op;
  op.scale = 1.0;
  op.factors = bf.factors;
  return op;
}

}  // namespace sparsefact
