#include "sparsefact/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace sparsefact {

namespace {

// Total order on entries: larger magnitude first, then smaller row-major
// position.  Using a total order makes every selection below a deterministic
// set, independent of how the selection algorithm permutes its input.
struct RankOrder {
  const double* abs;
  bool operator()(Index a, Index b) const {
    return abs[a] != abs[b] ? abs[a] > abs[b] : a < b;
  }
};

// Indices of the m highest-ranked entries among vals[0..n), in ascending
// index order.
std::vector<Index> top_entries(const std::vector<double>& abs, Index m) {
  const Index n = static_cast<Index>(abs.size());
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  if (m < n) {
    std::nth_element(idx.begin(), idx.begin() + m, idx.end(),
                     RankOrder{abs.data()});
    idx.resize(m);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

ConstraintSet::ConstraintSet(ConstraintKind kind, Index rows, Index cols,
                             Index budget)
    : kind_(kind), rows_(rows), cols_(cols), budget_(budget) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("ConstraintSet: shape must be positive");
  if (kind != ConstraintKind::Unconstrained && budget < 1)
    throw std::invalid_argument("ConstraintSet: budget must be at least 1");
}

ConstraintSet ConstraintSet::global_sparse_unit_norm(Index rows, Index cols,
                                                     Index p) {
  return ConstraintSet(ConstraintKind::GlobalSparseUnitNorm, rows, cols, p);
}

ConstraintSet ConstraintSet::column_sparse(Index rows, Index cols, Index k) {
  return ConstraintSet(ConstraintKind::ColumnSparse, rows, cols, k);
}

ConstraintSet ConstraintSet::row_sparse(Index rows, Index cols, Index k) {
  return ConstraintSet(ConstraintKind::RowSparse, rows, cols, k);
}

ConstraintSet ConstraintSet::row_col_sparse(Index rows, Index cols, Index k) {
  return ConstraintSet(ConstraintKind::RowColSparse, rows, cols, k);
}

ConstraintSet ConstraintSet::unconstrained(Index rows, Index cols) {
  return ConstraintSet(ConstraintKind::Unconstrained, rows, cols, 0);
}

ConstraintSet ConstraintSet::transposed() const {
  switch (kind_) {
    case ConstraintKind::ColumnSparse:
      return row_sparse(cols_, rows_, budget_);
    case ConstraintKind::RowSparse:
      return column_sparse(cols_, rows_, budget_);
    default:
      return ConstraintSet(kind_, cols_, rows_, budget_);
  }
}

Index ConstraintSet::max_nnz() const {
  switch (kind_) {
    case ConstraintKind::GlobalSparseUnitNorm:
      return std::min(budget_, rows_ * cols_);
    case ConstraintKind::ColumnSparse:
      return std::min(budget_, rows_) * cols_;
    case ConstraintKind::RowSparse:
      return std::min(budget_, cols_) * rows_;
    case ConstraintKind::RowColSparse:
      return std::min(budget_ * (rows_ + cols_), rows_ * cols_);
    case ConstraintKind::Unconstrained:
      return rows_ * cols_;
  }
  return 0;
}

bool ConstraintSet::is_feasible(const Matrix& a, double norm_tol) const {
  if (a.rows() != rows_ || a.cols() != cols_)
    throw std::invalid_argument("ConstraintSet::is_feasible: shape mismatch");
  switch (kind_) {
    case ConstraintKind::GlobalSparseUnitNorm: {
      Index nnz = 0;
      double sq = 0.0;
      for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j) {
          const double v = a(i, j);
          if (v != 0.0) ++nnz;
          sq += v * v;
        }
      return nnz <= budget_ && std::abs(std::sqrt(sq) - 1.0) <= norm_tol;
    }
    case ConstraintKind::ColumnSparse: {
      for (Index j = 0; j < cols_; ++j) {
        Index nnz = 0;
        for (Index i = 0; i < rows_; ++i)
          if (a(i, j) != 0.0) ++nnz;
        if (nnz > budget_) return false;
      }
      return true;
    }
    case ConstraintKind::RowSparse: {
      for (Index i = 0; i < rows_; ++i) {
        Index nnz = 0;
        for (Index j = 0; j < cols_; ++j)
          if (a(i, j) != 0.0) ++nnz;
        if (nnz > budget_) return false;
      }
      return true;
    }
    case ConstraintKind::RowColSparse: {
      // Every nonzero has to rank in the top k of its row or of its column,
      // under the same order the projection uses.
      for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j) {
          const double v = std::abs(a(i, j));
          if (v == 0.0) continue;
          Index row_rank = 0;
          for (Index j2 = 0; j2 < cols_; ++j2) {
            const double w = std::abs(a(i, j2));
            if (w > v || (w == v && j2 < j)) ++row_rank;
          }
          if (row_rank < budget_) continue;
          Index col_rank = 0;
          for (Index i2 = 0; i2 < rows_; ++i2) {
            const double w = std::abs(a(i2, j));
            if (w > v || (w == v && i2 < i)) ++col_rank;
          }
          if (col_rank >= budget_) return false;
        }
      double sq = 0.0;
      for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j) sq += a(i, j) * a(i, j);
      return std::abs(std::sqrt(sq) - 1.0) <= norm_tol;
    }
    case ConstraintKind::Unconstrained:
      return true;
  }
  return false;
}

std::optional<Matrix> ConstraintSet::project(const Matrix& a) const {
  if (a.rows() != rows_ || a.cols() != cols_)
    throw std::invalid_argument("ConstraintSet::project: shape mismatch");

  switch (kind_) {
    case ConstraintKind::Unconstrained:
      return a;

    case ConstraintKind::GlobalSparseUnitNorm: {
      const Index total = rows_ * cols_;
      std::vector<double> abs(total);
      for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j)
          abs[i * cols_ + j] = std::abs(a(i, j));
      const auto keep = top_entries(abs, std::min(budget_, total));

      double sq = 0.0;
      for (Index pos : keep) {
        const double v = a(pos / cols_, pos % cols_);
        sq += v * v;
      }
      const double norm = std::sqrt(sq);
      if (norm == 0.0) return std::nullopt;
      // Rescaling an already unit-norm matrix would drift its entries by an
      // ulp or two; skipping the division inside this band keeps the
      // projection idempotent bit for bit.
      const bool rescale = std::abs(norm - 1.0) > 1e-12;

      Matrix out = Matrix::Zero(rows_, cols_);
      for (Index pos : keep) {
        const double v = a(pos / cols_, pos % cols_);
        out(pos / cols_, pos % cols_) = rescale ? v / norm : v;
      }
      return out;
    }

    case ConstraintKind::ColumnSparse: {
      Matrix out = Matrix::Zero(rows_, cols_);
      std::vector<double> abs(rows_);
      for (Index j = 0; j < cols_; ++j) {
        for (Index i = 0; i < rows_; ++i) abs[i] = std::abs(a(i, j));
        for (Index i : top_entries(abs, std::min(budget_, rows_)))
          out(i, j) = a(i, j);
      }
      return out;
    }

    case ConstraintKind::RowSparse: {
      Matrix out = Matrix::Zero(rows_, cols_);
      std::vector<double> abs(cols_);
      for (Index i = 0; i < rows_; ++i) {
        for (Index j = 0; j < cols_; ++j) abs[j] = std::abs(a(i, j));
        for (Index j : top_entries(abs, std::min(budget_, cols_)))
          out(i, j) = a(i, j);
      }
      return out;
    }

    case ConstraintKind::RowColSparse: {
      // Union of the per-row and per-column top-k supports, then a unit-norm
      // rescale.  Zero entries never enter the support, so rows or columns
      // with fewer than k nonzeros contribute only what they have.
      std::vector<char> keep(static_cast<size_t>(rows_ * cols_), 0);
      std::vector<double> absrow(cols_), abscol(rows_);
      for (Index i = 0; i < rows_; ++i) {
        for (Index j = 0; j < cols_; ++j) absrow[j] = std::abs(a(i, j));
        for (Index j : top_entries(absrow, std::min(budget_, cols_)))
          if (a(i, j) != 0.0) keep[i * cols_ + j] = 1;
      }
      for (Index j = 0; j < cols_; ++j) {
        for (Index i = 0; i < rows_; ++i) abscol[i] = std::abs(a(i, j));
        for (Index i : top_entries(abscol, std::min(budget_, rows_)))
          if (a(i, j) != 0.0) keep[i * cols_ + j] = 1;
      }

      double sq = 0.0;
      for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j)
          if (keep[i * cols_ + j]) sq += a(i, j) * a(i, j);
      const double norm = std::sqrt(sq);
      if (norm == 0.0) return std::nullopt;
      const bool rescale = std::abs(norm - 1.0) > 1e-12;

      Matrix out = Matrix::Zero(rows_, cols_);
      for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j)
          if (keep[i * cols_ + j]) out(i, j) = rescale ? a(i, j) / norm : a(i, j);
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace sparsefact
