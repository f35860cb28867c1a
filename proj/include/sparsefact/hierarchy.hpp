#pragma once

#include "sparsefact/palm.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace sparsefact {

enum class SplitSide { FromLeft, FromRight };

// One level of the residual recursion: the residual splits into a factor
// that is kept (peeled) and a new residual.  Shapes are stated in the
// orientation of the input matrix's factor chain regardless of side.
struct SplitStep {
  ConstraintSet peeled;
  ConstraintSet residual;
};

struct SplitSchedule {
  SplitSide side = SplitSide::FromLeft;
  std::vector<SplitStep> steps;  // Q-1 steps for a Q-factor result
};

struct FactorizationReport {
  MultiLayerOperator op;
  double rmse_value = 0.0;
  double rc = 0.0;
  // One trace per split (empty when a hook replaced that split), and one per
  // global refinement step together with the objective at its warm start.
  std::vector<std::vector<double>> split_traces;
  std::vector<double> pre_global_objectives;
  std::vector<std::vector<double>> global_traces;
  std::uint64_t seed = 0;
  PalmConfig config;
  double wall_ms = 0.0;
};

struct TwoFactorSplit {
  double scale = 1.0;
  Matrix left;
  Matrix right;
};

// Hooks run in the internal left-peeling orientation: for a FromRight
// schedule that is the transposed problem, where the peeled factor sits on
// the left and the residual on the right.
struct HierarchyHooks {
  // Replace the two-factor split of the residual at step k (0-based);
  // return nullopt to run the regular PALM split.
  std::function<std::optional<TwoFactorSplit>(Index k, const Matrix& residual)>
      split_override;
  // Called after each global refinement; may adjust the factors (peeled ones
  // followed by the residual) and the scale in place.
  std::function<void(Index k, std::vector<Matrix>& factors, double& scale)>
      post_global;
};

// Warm start for a two-factor split of `residual`: left factor is the
// truncated identity projected onto its set, right factor is the residual
// projected onto its set, scale 1.
PalmState split_init(const Matrix& residual, const ConstraintSet& peeled,
                     const ConstraintSet& residual_set);

// Peels one factor per step off the residual with a two-factor PALM run,
// then re-optimizes all factors produced so far against the full matrix
// (warm-started, so each global step can only improve on its starting
// objective).  The first split needs no global step: it already optimizes
// the full matrix over exactly the same two sets.  A FromRight schedule runs
// the same procedure on the transposed matrix with transposed sets and
// returns the factors transposed and in reversed order.
//
// rc_dict_factors selects how many leading factors count toward the
// report's relative complexity (all of them when < 0; pass Q-1 when the last
// factor holds coefficients).  seed is echoed into the report.
FactorizationReport hierarchical_factorize(const Matrix& x,
                                           const SplitSchedule& schedule,
                                           const PalmConfig& cfg,
                                           Index rc_dict_factors = -1,
                                           const HierarchyHooks& hooks = {},
                                           std::uint64_t seed = 0);

// Schedule that factorizes hadamard(n) into log2(n) factors of 2n entries
// each: every peeled set keeps 2n entries, and the residual budget halves at
// each level (n^2/2, n^2/4, ..., down to 2n), matching the entry count of
// the exact butterfly remainder so the recursion can stay exact.
SplitSchedule build_hadamard_schedule(Index n);

// Right-peeling schedule for learning a d x d dictionary as q-1 square
// factors from d x n training data.  The first split peels the coefficient
// matrix (k_atoms nonzeros per column, no normalization); later splits peel
// unit-norm factors with d*p entries; residual budgets start at
// min(2*cap, d*d) and decay as ceil(cap / 2^(k-2)).
SplitSchedule build_experiment_schedule(Index d, Index n, Index q, Index p,
                                        Index cap, Index k_atoms = 5);

}  // namespace sparsefact
