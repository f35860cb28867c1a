#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sparsefact {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

// Sparse matrix stored as coordinate triplets, sorted by (row, col).
// Invariants enforced at construction: indices in bounds, strictly sorted
// (hence no duplicates), no stored zeros, all values finite.  Iteration
// order over triplets() is therefore deterministic.
class CooMatrix {
 public:
  CooMatrix() = default;
  CooMatrix(Index rows, Index cols, std::vector<Triplet> triplets);

  // Drops exact zeros; triplets come out in row-major order.
  static CooMatrix from_dense(const Matrix& m);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(triplets_.size()); }
  const std::vector<Triplet>& triplets() const { return triplets_; }

  Matrix to_dense() const;
  CooMatrix transposed() const;

  // y = S x, one multiply-add per stored entry.  When madds is non-null the
  // count of multiply-adds is accumulated into it.
  Vector apply(const Vector& x, long long* madds = nullptr) const;
  // y = S^T x, same cost.
  Vector apply_transpose(const Vector& x, long long* madds = nullptr) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Triplet> triplets_;
};

// Scaled product of sparse layers: v -> scale * S_1 (S_2 (... (S_Q v))).
// Factor dimensions must chain; scale must be finite.
struct MultiLayerOperator {
  double scale = 1.0;
  std::vector<CooMatrix> factors;
};

// Throws std::invalid_argument when dimensions do not chain or the scale is
// not finite.
void validate(const MultiLayerOperator& op);

Vector apply(const MultiLayerOperator& op, const Vector& x,
             long long* madds = nullptr);

Matrix to_dense(const MultiLayerOperator& op);

// Stored-entry count of a prefix of the factor chain relative to a dense
// d x a matrix: sum of nnz over the first dict_factors factors divided by
// d*a.  dict_factors < 0 means all factors.  Used to compare the cost of a
// learned operator against storing the dense matrix it replaces; when the
// last factor holds coefficients rather than part of the dictionary, pass
// dict_factors = Q - 1.
double relative_complexity(const MultiLayerOperator& op, Index d, Index a,
                           Index dict_factors = -1);

}  // namespace sparsefact
