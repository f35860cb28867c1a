#include "sparsefact/hierarchy.hpp"

#include "sparsefact/metrics.hpp"

#include <chrono>
#include <cmath>

namespace sparsefact {

namespace {

void validate_schedule(const Matrix& x, const std::vector<SplitStep>& steps) {
  if (steps.empty())
    throw std::invalid_argument("hierarchical_factorize: schedule needs at least one split");
  if (steps.front().peeled.rows() != x.rows())
    throw std::invalid_argument("hierarchical_factorize: first peeled set does not match data rows");
  for (size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].peeled.cols() != steps[k].residual.rows())
      throw std::invalid_argument("hierarchical_factorize: split shapes do not chain");
    if (steps[k].residual.cols() != x.cols())
      throw std::invalid_argument("hierarchical_factorize: residual set does not match data cols");
    if (k + 1 < steps.size() &&
        steps[k + 1].peeled.rows() != steps[k].residual.rows())
      throw std::invalid_argument("hierarchical_factorize: consecutive splits do not chain");
  }
}

struct CoreResult {
  std::vector<Matrix> factors;
  double scale = 1.0;
  std::vector<std::vector<double>> split_traces;
  std::vector<double> pre_global_objectives;
  std::vector<std::vector<double>> global_traces;
};

CoreResult run_left_peeling(const Matrix& x, const std::vector<SplitStep>& steps,
                            const PalmConfig& cfg, const HierarchyHooks& hooks) {
  CoreResult out;
  std::vector<Matrix> factors;
  Matrix residual = x;
  double lam = 1.0;

  for (size_t k = 0; k < steps.size(); ++k) {
    std::optional<TwoFactorSplit> forced;
    if (hooks.split_override)
      forced = hooks.split_override(static_cast<Index>(k), residual);
    if (forced) {
      factors.push_back(std::move(forced->left));
      residual = std::move(forced->right);
      lam *= forced->scale;
      out.split_traces.emplace_back();
    } else {
      const PalmState init =
          split_init(residual, steps[k].peeled, steps[k].residual);
      PalmState st = palm_factorize(
          residual, {steps[k].peeled, steps[k].residual}, init, cfg);
      factors.push_back(st.factors[0].to_dense());
      residual = st.factors[1].to_dense();
      lam *= st.scale;
      out.split_traces.push_back(std::move(st.objective_trace));
    }

    // The first split already minimizes over the full matrix with exactly
    // these two sets, so a global pass would re-run the same problem.
    if (k >= 1) {
      std::vector<ConstraintSet> sets;
      for (size_t j = 0; j <= k; ++j) sets.push_back(steps[j].peeled);
      sets.push_back(steps[k].residual);

      PalmState init;
      init.scale = lam;
      for (const Matrix& m : factors)
        init.factors.push_back(CooMatrix::from_dense(m));
      init.factors.push_back(CooMatrix::from_dense(residual));

      {
        std::vector<Matrix> current = factors;
        current.push_back(residual);
        out.pre_global_objectives.push_back(objective(x, current, lam));
      }

      PalmState st = palm_factorize(x, sets, std::move(init), cfg);
      factors.clear();
      for (size_t j = 0; j <= k; ++j)
        factors.push_back(st.factors[j].to_dense());
      residual = st.factors[k + 1].to_dense();
      lam = st.scale;
      out.global_traces.push_back(std::move(st.objective_trace));

      if (hooks.post_global) {
        std::vector<Matrix> all = factors;
        all.push_back(residual);
        hooks.post_global(static_cast<Index>(k), all, lam);
        if (all.size() != k + 2)
          throw std::logic_error("post_global hook changed the factor count");
        residual = all.back();
        all.pop_back();
        factors = std::move(all);
      }
    }
  }

  factors.push_back(residual);
  out.factors = std::move(factors);
  out.scale = lam;
  return out;
}

}  // namespace

PalmState split_init(const Matrix& residual, const ConstraintSet& peeled,
                     const ConstraintSet& residual_set) {
  PalmState st;
  st.scale = 1.0;
  auto left = peeled.project(Matrix::Identity(peeled.rows(), peeled.cols()));
  if (!left)
    throw std::invalid_argument("split_init: degenerate identity projection");
  // With the left factor seeded near a truncated identity, the product picks
  // out the leading rows of the right factor, so those rows get the residual.
  Matrix seed = Matrix::Zero(residual_set.rows(), residual_set.cols());
  const Index copy = std::min(residual.rows(), residual_set.rows());
  seed.topRows(copy) = residual.topRows(copy);
  auto right = residual_set.project(seed);
  if (!right)
    throw std::invalid_argument("split_init: residual projects to zero");
  st.factors.push_back(CooMatrix::from_dense(*left));
  st.factors.push_back(CooMatrix::from_dense(*right));
  return st;
}

FactorizationReport hierarchical_factorize(const Matrix& x,
                                           const SplitSchedule& schedule,
                                           const PalmConfig& cfg,
                                           Index rc_dict_factors,
                                           const HierarchyHooks& hooks,
                                           std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();

  const bool mirrored = schedule.side == SplitSide::FromRight;
  Matrix data = mirrored ? Matrix(x.transpose()) : x;
  std::vector<SplitStep> steps;
  steps.reserve(schedule.steps.size());
  for (const SplitStep& s : schedule.steps)
    steps.push_back(mirrored
                        ? SplitStep{s.peeled.transposed(), s.residual.transposed()}
                        : s);
  validate_schedule(data, steps);

  CoreResult core = run_left_peeling(data, steps, cfg, hooks);

  FactorizationReport rep;
  rep.op.scale = core.scale;
  if (mirrored) {
    for (auto it = core.factors.rbegin(); it != core.factors.rend(); ++it)
      rep.op.factors.push_back(CooMatrix::from_dense(it->transpose()));
  } else {
    for (const Matrix& m : core.factors)
      rep.op.factors.push_back(CooMatrix::from_dense(m));
  }
  validate(rep.op);

  rep.rmse_value = rmse(x, to_dense(rep.op));
  const Index q = static_cast<Index>(rep.op.factors.size());
  const Index dict = rc_dict_factors < 0 ? q : rc_dict_factors;
  if (dict < 1 || dict > q)
    throw std::invalid_argument("hierarchical_factorize: bad rc factor count");
  rep.rc = relative_complexity(rep.op, x.rows(),
                               rep.op.factors[dict - 1].cols(), dict);
  rep.split_traces = std::move(core.split_traces);
  rep.pre_global_objectives = std::move(core.pre_global_objectives);
  rep.global_traces = std::move(core.global_traces);
  rep.seed = seed;
  rep.config = cfg;
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

SplitSchedule build_hadamard_schedule(Index n) {
  if (n < 4 || (n & (n - 1)) != 0)
    throw std::invalid_argument("build_hadamard_schedule: n must be a power of two, at least 4");
  // Butterfly factors carry 2 entries per row and per column; the residual
  // keeps a per-row/column budget that halves with each peel.  Balanced
  // budgets matter here: a global budget on a matrix with equal-magnitude
  // entries collapses onto whole rows and the iteration never recovers.
  SplitSchedule sched;
  sched.side = SplitSide::FromLeft;
  for (Index budget = n / 2; budget >= 2; budget /= 2)
    sched.steps.push_back({ConstraintSet::row_col_sparse(n, n, 2),
                           ConstraintSet::row_col_sparse(n, n, budget)});
  return sched;
}

SplitSchedule build_experiment_schedule(Index d, Index n, Index q, Index p,
                                        Index cap, Index k_atoms) {
  if (d < 1 || n < 1)
    throw std::invalid_argument("build_experiment_schedule: bad data shape");
  if (q < 2)
    throw std::invalid_argument("build_experiment_schedule: need at least two factors");
  if (p < 1 || cap < 1 || k_atoms < 1)
    throw std::invalid_argument("build_experiment_schedule: budgets must be positive");

  SplitSchedule sched;
  sched.side = SplitSide::FromRight;
  const Index full = d * d;
  sched.steps.push_back(
      {ConstraintSet::column_sparse(d, n, k_atoms),
       ConstraintSet::global_sparse_unit_norm(d, d, std::min(2 * cap, full))});
  for (Index k = 2; k < q; ++k) {
    const Index div = Index{1} << (k - 2);
    const Index budget = std::min((cap + div - 1) / div, full);
    sched.steps.push_back(
        {ConstraintSet::global_sparse_unit_norm(d, d, std::min(d * p, full)),
         ConstraintSet::global_sparse_unit_norm(d, d, budget)});
  }
  return sched;
}

}  // namespace sparsefact
