#pragma once

#include "sparsefact/types.hpp"

namespace sparsefact {

// Largest singular value estimated by power iteration on m^T m, started from
// the normalized all-ones vector.  Stops when successive Rayleigh quotients
// agree to a relative tol or after max_iter iterations; the estimate is a
// Rayleigh quotient, so it never exceeds the true norm.  A zero matrix (or a
// start vector that m annihilates after deterministic restarts) gives 0.
// When converged is non-null it reports whether the tolerance was reached.
double spectral_norm(const Matrix& m, double tol = 1e-7, int max_iter = 100,
                     bool* converged = nullptr);

double spectral_norm(const CooMatrix& m, double tol = 1e-7, int max_iter = 100,
                     bool* converged = nullptr);

}  // namespace sparsefact
