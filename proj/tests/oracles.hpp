#pragma once

// Independent reference implementations used only by tests.  Everything in
// here is deliberately naive (triple loops, exhaustive enumeration, scalar
// recurrences) so that agreement with the library is meaningful.

#include "sparsefact/types.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <vector>

namespace oracles {

using sparsefact::Index;
using sparsefact::Matrix;

inline Matrix naive_multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("naive_multiply");
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      for (Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

inline bool bitwise_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      const double x = a(i, j), y = b(i, j);
      if (std::memcmp(&x, &y, sizeof x) != 0) return false;
    }
  return true;
}

// Largest singular value via a cyclic Jacobi eigenvalue sweep on the Gram
// matrix.  No dependence on the library's power iteration or on Eigen's
// decompositions.
inline double jacobi_sigma_max(const Matrix& m) {
  const Index n = m.cols();
  Matrix g = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < m.rows(); ++k) g(i, j) += m(k, i) * m(k, j);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += g(p, q) * g(p, q);
    if (off < 1e-24) break;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) {
        if (g(p, q) == 0.0) continue;
        const double theta = (g(q, q) - g(p, p)) / (2.0 * g(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double gkp = g(k, p), gkq = g(k, q);
          g(k, p) = c * gkp - s * gkq;
          g(k, q) = s * gkp + c * gkq;
        }
        for (Index k = 0; k < n; ++k) {
          const double gpk = g(p, k), gqk = g(q, k);
          g(p, k) = c * gpk - s * gqk;
          g(q, k) = s * gpk + c * gqk;
        }
      }
  }
  double top = 0.0;
  for (Index i = 0; i < n; ++i) top = std::max(top, g(i, i));
  return std::sqrt(std::max(top, 0.0));
}

// Best approximation of `a` among matrices with at most p nonzeros and unit
// Frobenius norm, by enumerating every support of size 1..p.  For a support
// T the best unit-norm point is a|_T / ||a|_T||, at squared distance
// ||a||^2 + 1 - 2 ||a|_T||, so enumeration only has to rank ||a|_T||.
// Returns the point and its distance; nullopt when a is all zero (every
// support gives norm 0 and the projection is undefined).
struct SparseUnitBest {
  Matrix point;
  double distance = 0.0;
};

inline std::optional<SparseUnitBest> enumerate_sparse_unit_best(
    const Matrix& a, Index p) {
  const Index total = a.rows() * a.cols();
  if (total > 24) throw std::invalid_argument("enumeration oracle is exhaustive");
  std::optional<SparseUnitBest> best;
  for (std::uint32_t mask = 1; mask < (1u << total); ++mask) {
    Index bits = 0;
    for (std::uint32_t m2 = mask; m2; m2 &= m2 - 1) ++bits;
    if (bits > p) continue;
    Matrix cand = Matrix::Zero(a.rows(), a.cols());
    double sq = 0.0;
    for (Index pos = 0; pos < total; ++pos)
      if (mask & (1u << pos)) {
        const double v = a(pos / a.cols(), pos % a.cols());
        cand(pos / a.cols(), pos % a.cols()) = v;
        sq += v * v;
      }
    if (sq == 0.0) continue;
    cand /= std::sqrt(sq);
    const double dist = std::sqrt((cand - a).squaredNorm());
    if (!best || dist < best->distance) best = SparseUnitBest{cand, dist};
  }
  return best;
}

// Central finite differences of a scalar function of a matrix.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f,
                          const Matrix& at, double h = 1e-6) {
  Matrix g = Matrix::Zero(at.rows(), at.cols());
  Matrix probe = at;
  for (Index i = 0; i < at.rows(); ++i)
    for (Index j = 0; j < at.cols(); ++j) {
      const double orig = probe(i, j);
      probe(i, j) = orig + h;
      const double up = f(probe);
      probe(i, j) = orig - h;
      const double down = f(probe);
      probe(i, j) = orig;
      g(i, j) = (up - down) / (2.0 * h);
    }
  return g;
}

// Golden-section search for the minimizer of a unimodal scalar function.
inline double golden_section_min(const std::function<double(double)>& f,
                                 double lo, double hi, double tol = 1e-10) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2.0;
}

// Exact integer Sylvester matrix.
inline std::vector<std::vector<long long>> int_hadamard(Index n) {
  std::vector<std::vector<long long>> h(1, {1});
  for (Index m = 1; m < n; m *= 2) {
    std::vector<std::vector<long long>> next(
        2 * m, std::vector<long long>(2 * m, 0));
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) {
        next[i][j] = h[i][j];
        next[i][j + m] = h[i][j];
        next[i + m][j] = h[i][j];
        next[i + m][j + m] = -h[i][j];
      }
    h = std::move(next);
  }
  return h;
}

// Product of a sparse factor chain in exact integer arithmetic, evaluated
// column by column against the canonical basis.  Factor entries must be
// integral (they are +-1 for butterfly chains).
inline std::vector<std::vector<long long>> int_chain_product(
    const std::vector<sparsefact::CooMatrix>& factors, Index n) {
  std::vector<std::vector<long long>> out(n, std::vector<long long>(n, 0));
  for (Index col = 0; col < n; ++col) {
    std::vector<long long> v(n, 0);
    v[col] = 1;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
      std::vector<long long> next(it->rows(), 0);
      for (const sparsefact::Triplet& t : it->triplets()) {
        const long long iv = static_cast<long long>(t.value);
        if (static_cast<double>(iv) != t.value)
          throw std::invalid_argument("int_chain_product: non-integer entry");
        next[t.row] += iv * v[t.col];
      }
      v = std::move(next);
    }
    for (Index row = 0; row < n; ++row) out[row][col] = v[row];
  }
  return out;
}

}  // namespace oracles
