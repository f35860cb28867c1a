#pragma once

#include "sparsefact/types.hpp"

#include <optional>

namespace sparsefact {

enum class ConstraintKind {
  GlobalSparseUnitNorm,  // at most p nonzeros in total, unit Frobenius norm
  ColumnSparse,          // at most k nonzeros per column, values kept as-is
  RowSparse,             // at most k nonzeros per row, values kept as-is
  RowColSparse,          // top-k per row and per column (union), unit norm
  Unconstrained,
};

// A feasible set for one factor: a sparsity pattern constraint tied to a
// fixed shape.  RowSparse is the transpose of ColumnSparse; it appears when
// a right-to-left factorization schedule is mirrored onto the transposed
// problem.  RowColSparse keeps every entry that ranks in the top k of its row
// or of its column; butterfly-structured transforms live in these sets, and
// the balanced support is what lets the hierarchy find them where a global
// budget collapses onto a few dominant rows.
class ConstraintSet {
 public:
  static ConstraintSet global_sparse_unit_norm(Index rows, Index cols, Index p);
  static ConstraintSet column_sparse(Index rows, Index cols, Index k);
  static ConstraintSet row_sparse(Index rows, Index cols, Index k);
  static ConstraintSet row_col_sparse(Index rows, Index cols, Index k);
  static ConstraintSet unconstrained(Index rows, Index cols);

  ConstraintKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  // Sparsity budget (p or k); 0 for Unconstrained.
  Index budget() const { return budget_; }

  ConstraintSet transposed() const;

  // Largest number of stored entries a feasible matrix can have.
  Index max_nnz() const;

  // Membership test; the unit-norm part is checked within norm_tol.
  bool is_feasible(const Matrix& a, double norm_tol = 1e-10) const;

  // Euclidean projection onto the set.  Keeps the largest-magnitude entries
  // (ties broken toward the smaller row-major position) and, for the
  // unit-norm variant, rescales to unit Frobenius norm.  Returns nullopt when
  // every retained entry is zero and a unit norm is required, which makes the
  // projection undefined; callers keep their previous iterate in that case.
  std::optional<Matrix> project(const Matrix& a) const;

 private:
  ConstraintSet(ConstraintKind kind, Index rows, Index cols, Index budget);

  ConstraintKind kind_;
  Index rows_;
  Index cols_;
  Index budget_;
};

}  // namespace sparsefact
