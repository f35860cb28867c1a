#include "sparsefact/spectral.hpp"

#include <cmath>

namespace sparsefact {

namespace {

// Power iteration on m^T m through a pair of matvec callbacks, so the dense
// and coordinate overloads share the loop.
template <typename Fwd, typename Adj>
double power_iteration(Index rows, Index cols, Fwd&& mul, Adj&& mul_t,
                       double tol, int max_iter, bool* converged) {
  if (converged) *converged = true;
  if (rows == 0 || cols == 0) return 0.0;

  Vector x = Vector::Ones(cols) / std::sqrt(static_cast<double>(cols));
  // All-ones can land in the null space of a nonzero matrix; fall back to
  // canonical basis vectors until the image is nonzero.
  Vector y = mul(x);
  for (Index k = 0; k < cols && y.norm() == 0.0; ++k) {
    x = Vector::Unit(cols, k);
    y = mul(x);
  }
  if (y.norm() == 0.0) return 0.0;

  double rayleigh = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector z = mul_t(y);            // z = m^T m x
    const double next = x.dot(z);   // Rayleigh quotient of m^T m, <= sigma_max^2
    const double zn = z.norm();
    if (zn == 0.0) {
      if (converged) *converged = true;
      return 0.0;
    }
    if (it > 0 && std::abs(next - rayleigh) < tol * next) {
      rayleigh = next;
      return std::sqrt(std::max(rayleigh, 0.0));
    }
    rayleigh = next;
    x = z / zn;
    y = mul(x);
  }
  if (converged) *converged = false;
  return std::sqrt(std::max(rayleigh, 0.0));
}

}  // namespace

double spectral_norm(const Matrix& m, double tol, int max_iter, bool* converged) {
  return power_iteration(
      m.rows(), m.cols(), [&](const Vector& v) -> Vector { return m * v; },
      [&](const Vector& v) -> Vector { return m.transpose() * v; }, tol,
      max_iter, converged);
}

double spectral_norm(const CooMatrix& m, double tol, int max_iter,
                     bool* converged) {
  return power_iteration(
      m.rows(), m.cols(), [&](const Vector& v) { return m.apply(v); },
      [&](const Vector& v) { return m.apply_transpose(v); }, tol, max_iter,
      converged);
}

}  // namespace sparsefact
