#pragma once

#include "sparsefact/constraints.hpp"
#include "sparsefact/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace sparsefact {

struct PalmConfig {
  int max_iter = 500;
  // Stop when the entrywise approximation error (sqrt(2*objective/(d*n)))
  // changes by less than this between consecutive outer iterations.
  double obj_tol = 1e-6;
  // Step size is (1 + step_margin) times the block Lipschitz modulus, keeping
  // the proximal step strictly inside the descent regime.
  double step_margin = 1e-3;
  double spectral_tol = 1e-7;
  // Floor for the Lipschitz modulus so the step stays finite when a block's
  // neighbours vanish.
  double min_modulus = 1e-12;
  // Diagnostic hook, called after every factor update with the updated factor
  // and the smooth objective at the new iterate.  Not serialized.
  std::function<void(int outer, int block, const Matrix& factor,
                     double objective)>
      block_observer;
};

struct PalmState {
  std::vector<CooMatrix> factors;
  double scale = 1.0;
  int iterations = 0;
  // 0.5 * ||X - scale * prod(factors)||_F^2 after each outer iteration.
  std::vector<double> objective_trace;
};

// Thrown when a non-finite value shows up in an iterate.  Factors cannot be
// represented sparsely at that point, so the carried state holds the trace
// and iteration count with an empty factor list.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, PalmState partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const PalmState& partial() const { return partial_; }

 private:
  PalmState partial_;
};

double objective(const Matrix& x, const std::vector<Matrix>& factors,
                 double scale);
double objective(const Matrix& x, const std::vector<CooMatrix>& factors,
                 double scale);

// Gradient of 0.5*||X - scale * L S R||_F^2 with respect to the middle
// factor S: scale * L^T (scale * L S R - X) R^T.  Pass identity matrices for
// L or R at the ends of the chain.
Matrix gradient_factor(const Matrix& x, const Matrix& l, const Matrix& r,
                       const Matrix& s, double scale);

// Lipschitz modulus of that gradient: scale^2 * |||R|||^2 * |||L|||^2 with
// |||.||| the spectral norm, floored at min_modulus.
double lipschitz_modulus(const Matrix& l, const Matrix& r, double scale,
                         double spectral_tol = 1e-7,
                         double min_modulus = 1e-12);

// One projected-gradient block update.  When the projection is degenerate
// the previous factor is returned unchanged.
Matrix update_factor(const Matrix& x, const Matrix& l, const Matrix& r,
                     const Matrix& s, double scale, const ConstraintSet& set,
                     const PalmConfig& cfg);

// Optimal scale argmin_s 0.5*||X - s * Xhat||_F^2 = <X, Xhat> / <Xhat, Xhat>;
// nullopt when Xhat is zero (callers keep their previous scale).
std::optional<double> update_scale(const Matrix& x, const Matrix& xhat);

// Identity-like starting point: factor j is the truncated identity of its
// set's shape projected onto the set, scale 1.
PalmState identity_init(const std::vector<ConstraintSet>& sets);

// Block-coordinate projected-gradient descent on
//   0.5 * ||X - scale * S_1 ... S_Q||_F^2,  S_j constrained to sets[j],
// sweeping factors left to right (each update sees the already-updated
// prefix and the not-yet-updated suffix), then refitting the scale, until the
// error variation drops below obj_tol or max_iter outer iterations.
// An empty init.factors list means identity_init(sets).
PalmState palm_factorize(const Matrix& x, const std::vector<ConstraintSet>& sets,
                         PalmState init, const PalmConfig& cfg);

}  // namespace sparsefact
