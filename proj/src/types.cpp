#include "sparsefact/types.hpp"

#include <algorithm>
#include <cmath>

namespace sparsefact {

namespace {

void check_dims(Index rows, Index cols) {
  if (rows < 0 || cols < 0)
    throw std::invalid_argument("CooMatrix: negative dimension");
}

}  // namespace

CooMatrix::CooMatrix(Index rows, Index cols, std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols), triplets_(std::move(triplets)) {
  check_dims(rows, cols);
  const Triplet* prev = nullptr;
  for (const Triplet& t : triplets_) {
    if (t.row < 0 || t.row >= rows_ || t.col < 0 || t.col >= cols_)
      throw std::invalid_argument("CooMatrix: index out of bounds");
    if (t.value == 0.0)
      throw std::invalid_argument("CooMatrix: stored zero");
    if (!std::isfinite(t.value))
      throw std::invalid_argument("CooMatrix: non-finite value");
    if (prev && (t.row < prev->row ||
                 (t.row == prev->row && t.col <= prev->col)))
      throw std::invalid_argument("CooMatrix: triplets not sorted or duplicated");
    prev = &t;
  }
}

CooMatrix CooMatrix::from_dense(const Matrix& m) {
  std::vector<Triplet> ts;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v == 0.0) continue;
      if (!std::isfinite(v))
        throw std::invalid_argument("CooMatrix::from_dense: non-finite entry");
      ts.push_back({i, j, v});
    }
  return CooMatrix(m.rows(), m.cols(), std::move(ts));
}

Matrix CooMatrix::to_dense() const {
  Matrix m = Matrix::Zero(rows_, cols_);
  for (const Triplet& t : triplets_) m(t.row, t.col) = t.value;
  return m;
}

CooMatrix CooMatrix::transposed() const {
  std::vector<Triplet> ts;
  ts.reserve(triplets_.size());
  for (const Triplet& t : triplets_) ts.push_back({t.col, t.row, t.value});
  std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return CooMatrix(cols_, rows_, std::move(ts));
}

Vector CooMatrix::apply(const Vector& x, long long* madds) const {
  if (x.size() != cols_)
    throw std::invalid_argument("CooMatrix::apply: size mismatch");
  Vector y = Vector::Zero(rows_);
  for (const Triplet& t : triplets_) y[t.row] += t.value * x[t.col];
  if (madds) *madds += static_cast<long long>(triplets_.size());
  return y;
}

Vector CooMatrix::apply_transpose(const Vector& x, long long* madds) const {
  if (x.size() != rows_)
    throw std::invalid_argument("CooMatrix::apply_transpose: size mismatch");
  Vector y = Vector::Zero(cols_);
  for (const Triplet& t : triplets_) y[t.col] += t.value * x[t.row];
  if (madds) *madds += static_cast<long long>(triplets_.size());
  return y;
}

void validate(const MultiLayerOperator& op) {
  if (!std::isfinite(op.scale))
    throw std::invalid_argument("MultiLayerOperator: non-finite scale");
  if (op.factors.empty())
    throw std::invalid_argument("MultiLayerOperator: empty factor list");
  for (size_t j = 0; j + 1 < op.factors.size(); ++j)
    if (op.factors[j].cols() != op.factors[j + 1].rows())
      throw std::invalid_argument("MultiLayerOperator: factor dimensions do not chain");
}

Vector apply(const MultiLayerOperator& op, const Vector& x, long long* madds) {
  validate(op);
  Vector y = x;
  for (auto it = op.factors.rbegin(); it != op.factors.rend(); ++it)
    y = it->apply(y, madds);
  if (op.scale != 1.0) y *= op.scale;
  return y;
}

Matrix to_dense(const MultiLayerOperator& op) {
  validate(op);
  Matrix m = op.factors.back().to_dense();
  for (auto it = std::next(op.factors.rbegin()); it != op.factors.rend(); ++it) {
    Matrix next = Matrix::Zero(it->rows(), m.cols());
    for (const Triplet& t : it->triplets())
      next.row(t.row) += t.value * m.row(t.col);
    m = std::move(next);
  }
  return op.scale * m;
}

double relative_complexity(const MultiLayerOperator& op, Index d, Index a,
                           Index dict_factors) {
  if (op.factors.empty())
    throw std::invalid_argument("relative_complexity: empty factor list");
  if (d <= 0 || a <= 0)
    throw std::invalid_argument("relative_complexity: reference dims must be positive");
  const Index q = static_cast<Index>(op.factors.size());
  const Index count = dict_factors < 0 ? q : dict_factors;
  if (count < 1 || count > q)
    throw std::invalid_argument("relative_complexity: bad dictionary factor count");
  long long total = 0;
  for (Index j = 0; j < count; ++j) total += op.factors[j].nnz();
  return static_cast<double>(total) / (static_cast<double>(d) * static_cast<double>(a));
}

}  // namespace sparsefact
