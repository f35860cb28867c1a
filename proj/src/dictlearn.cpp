#include "sparsefact/dictlearn.hpp"

#include "sparsefact/metrics.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparsefact {

namespace {

double nonzero_normal(Rng& rng) {
  double v = rng.normal();
  while (v == 0.0) v = rng.normal();
  return v;
}

}  // namespace

Index elimination_rank(Matrix m, double tol) {
  const Index rows = m.rows(), cols = m.cols();
  Index rank = 0;
  for (Index c = 0; c < cols && rank < rows; ++c) {
    Index pivot = rank;
    for (Index i = rank + 1; i < rows; ++i)
      if (std::abs(m(i, c)) > std::abs(m(pivot, c))) pivot = i;
    if (std::abs(m(pivot, c)) <= tol) continue;
    m.row(pivot).swap(m.row(rank));
    for (Index i = rank + 1; i < rows; ++i) {
      const double f = m(i, c) / m(rank, c);
      m.row(i).tail(cols - c) -= f * m.row(rank).tail(cols - c);
    }
    ++rank;
  }
  return rank;
}

SynthDictionary synth_dictionary(const SynthSpec& spec, Rng& rng) {
  if (spec.d < 1) throw std::invalid_argument("synth_dictionary: bad dimension");
  SynthDictionary out;

  if (spec.kind == DictKind::Gaussian) {
    out.d0 = Matrix(spec.d, spec.d);
    for (Index i = 0; i < spec.d; ++i)
      for (Index j = 0; j < spec.d; ++j) out.d0(i, j) = rng.normal();
    return out;
  }

  if (spec.factor_count < 1 || spec.nnz_min < 1 || spec.nnz_max < spec.nnz_min ||
      spec.nnz_max > spec.d * spec.d)
    throw std::invalid_argument("synth_dictionary: bad factor spec");

  for (int round = 0; round < 100; ++round) {
    out.factors.clear();
    out.d0 = Matrix::Identity(spec.d, spec.d);
    for (Index f = 0; f < spec.factor_count; ++f) {
      Matrix factor;
      bool full_rank = false;
      for (int attempt = 0; attempt < 100 && !full_rank; ++attempt) {
        const Index nnz =
            spec.nnz_min + rng.uniform_index(spec.nnz_max - spec.nnz_min + 1);
        factor = Matrix::Zero(spec.d, spec.d);
        if (nnz >= spec.d) {
          // Seed the support with a random permutation so every row and
          // column is hit; bare uniform supports near 2d entries leave rows
          // empty more often than not and the rank check would spin.
          std::vector<Index> perm(static_cast<size_t>(spec.d));
          std::iota(perm.begin(), perm.end(), Index{0});
          for (Index i = 0; i + 1 < spec.d; ++i)
            std::swap(perm[i], perm[i + rng.uniform_index(spec.d - i)]);
          for (Index i = 0; i < spec.d; ++i)
            factor(i, perm[i]) = nonzero_normal(rng);
          const auto extra = rng.sample_without_replacement(
              spec.d * (spec.d - 1), nnz - spec.d);
          for (Index cell : extra) {
            const Index i = cell / (spec.d - 1);
            Index j = cell % (spec.d - 1);
            if (j >= perm[i]) ++j;
            factor(i, j) = nonzero_normal(rng);
          }
        } else {
          // Fewer entries than rows can never reach full rank; draw anyway
          // and let the check below reject, matching the error contract.
          const auto pos = rng.sample_without_replacement(spec.d * spec.d, nnz);
          for (Index cell : pos)
            factor(cell / spec.d, cell % spec.d) = nonzero_normal(rng);
        }
        full_rank = elimination_rank(factor) == spec.d;
      }
      if (!full_rank)
        throw std::runtime_error(
            "synth_dictionary: no full-rank factor in 100 attempts");
      out.factors.push_back(factor);
      out.d0 = out.d0 * factor;
    }
    // Full-rank factors do not keep the product full rank in floating point:
    // their condition numbers multiply and can eat the last pivot.  Redraw
    // when that happens.
    if (elimination_rank(out.d0) == spec.d) return out;
  }
  throw std::runtime_error(
      "synth_dictionary: no full-rank product in 100 attempts");
}

SynthData synth_training_data(const Matrix& d0, Index n, Index k, Rng& rng) {
  const Index a = d0.cols();
  if (n < 1 || k < 1 || k > a)
    throw std::invalid_argument("synth_training_data: bad sample spec");
  std::vector<Triplet> ts;
  ts.reserve(static_cast<size_t>(n * k));
  // Column-by-column draw; triplets are collected per column and sorted once.
  for (Index j = 0; j < n; ++j) {
    const auto rows = rng.sample_without_replacement(a, k);
    for (Index r : rows) {
      double v = rng.normal();
      while (v == 0.0) v = rng.normal();
      ts.push_back({r, j, v});
    }
  }
  std::sort(ts.begin(), ts.end(), [](const Triplet& p, const Triplet& q) {
    return p.row != q.row ? p.row < q.row : p.col < q.col;
  });
  SynthData out;
  out.gamma0 = CooMatrix(a, n, std::move(ts));
  out.x = d0 * out.gamma0.to_dense();
  return out;
}

OmpResult omp_encode(const Matrix& dict, const Vector& x, Index k) {
  const Index d = dict.rows(), a = dict.cols();
  if (x.size() != d) throw std::invalid_argument("omp_encode: size mismatch");
  if (k < 1 || k > a) throw std::invalid_argument("omp_encode: bad sparsity");

  Vector inv_norm(a);
  for (Index j = 0; j < a; ++j) {
    const double nj = dict.col(j).norm();
    inv_norm[j] = nj > 0.0 ? 1.0 / nj : 0.0;  // zero atoms never get picked
  }

  OmpResult out;
  out.coeffs = Vector::Zero(a);
  Vector r = x;
  const double x_norm = x.norm();
  std::vector<bool> used(a, false);

  for (Index step = 0; step < k; ++step) {
    if (r.norm() <= 1e-14 * std::max(x_norm, 1.0)) break;
    Index best = -1;
    double best_score = 0.0;
    for (Index j = 0; j < a; ++j) {
      if (used[j] || inv_norm[j] == 0.0) continue;
      const double score = std::abs(dict.col(j).dot(r)) * inv_norm[j];
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) break;
    used[best] = true;
    out.support.push_back(best);

    Matrix sub(d, static_cast<Index>(out.support.size()));
    for (size_t i = 0; i < out.support.size(); ++i)
      sub.col(static_cast<Index>(i)) = dict.col(out.support[i]);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
    if (cod.rank() < sub.cols()) out.rank_deficient = true;
    const Vector gamma = cod.solve(x);
    r = x - sub * gamma;
    for (size_t i = 0; i < out.support.size(); ++i)
      out.coeffs[out.support[i]] = gamma[static_cast<Index>(i)];
  }
  out.residual_norm = r.norm();
  return out;
}

OmpMatrixResult omp_encode(const Matrix& dict, const Matrix& x, Index k) {
  if (x.rows() != dict.rows())
    throw std::invalid_argument("omp_encode: row mismatch");
  OmpMatrixResult out;
  std::vector<Triplet> ts;
  for (Index j = 0; j < x.cols(); ++j) {
    const Vector column = x.col(j);
    const OmpResult col = omp_encode(dict, column, k);
    if (col.rank_deficient) ++out.rank_deficient_columns;
    for (Index i = 0; i < col.coeffs.size(); ++i)
      if (col.coeffs[i] != 0.0) ts.push_back({i, j, col.coeffs[i]});
  }
  std::sort(ts.begin(), ts.end(), [](const Triplet& p, const Triplet& q) {
    return p.row != q.row ? p.row < q.row : p.col < q.col;
  });
  out.gamma = CooMatrix(dict.cols(), x.cols(), std::move(ts));
  return out;
}

FactorizationReport proposed_learn(const Matrix& x, Index q, Index p,
                                   Index cap, const PalmConfig& cfg,
                                   std::uint64_t seed, Index k_atoms,
                                   int restarts) {
  if (restarts < 1) throw std::invalid_argument("proposed_learn: bad restarts");
  const Index d = x.rows();
  const SplitSchedule schedule =
      build_experiment_schedule(d, x.cols(), q, p, cap, k_atoms);

  HierarchyHooks hooks;
  // The hierarchy runs on the transposed problem (right-peeling schedule),
  // so factor 0 is the transposed coefficient matrix and the dictionary-side
  // factors live transposed behind it.

  int round = 0;
  hooks.split_override = [&](Index k,
                             const Matrix& residual) -> std::optional<TwoFactorSplit> {
    if (k != 0) return std::nullopt;
    // Seed the recursion like a single sparse-coding alternation: code the
    // data against an orthonormal basis of its column space, then refit the
    // dictionary to those codes by least squares.
    const Matrix data = residual.transpose();  // back to d x n
    Eigen::BDCSVD<Matrix> svd(data, Eigen::ComputeThinU);
    Matrix basis = svd.matrixU();
    if (basis.cols() < d) {
      // Rank-deficient data: pad with identity columns so the dictionary
      // keeps its full shape.
      Matrix padded = Matrix::Identity(d, d);
      padded.leftCols(basis.cols()) = basis;
      basis = std::move(padded);
    }
    if (round > 0 && round % 2 == 1) {
      // Odd restarts rotate the basis by a seeded random orthogonal matrix:
      // same span, different greedy coding, different basin.
      Rng rot = Rng::derive(seed, static_cast<std::uint64_t>(round));
      Matrix g(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) g(i, j) = rot.normal();
      const Eigen::HouseholderQR<Matrix> qr(g);
      basis = basis * (qr.householderQ() * Matrix::Identity(d, d));
    } else if (round > 0) {
      // Even restarts seed the coding with normalized random data columns,
      // the usual dictionary-learning warm start.  Degenerate picks keep the
      // basis column they would have replaced.
      Rng init_rng = Rng::derive(seed, static_cast<std::uint64_t>(round));
      const auto picks = init_rng.sample_without_replacement(
          data.cols(), std::min(d, data.cols()));
      for (size_t i = 0; i < picks.size(); ++i) {
        const double nrm = data.col(picks[i]).norm();
        if (nrm > 0.0)
          basis.col(static_cast<Index>(i)) = data.col(picks[i]) / nrm;
      }
    }
    const CooMatrix gamma = omp_encode(basis, data, k_atoms).gamma;
    const Matrix gamma_d = gamma.to_dense();
    // argmin_D ||data - D Gamma||_F, least-norm when Gamma is rank
    // deficient.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(
        Matrix(gamma_d.transpose()));
    const Matrix dict = cod.solve(data.transpose()).transpose();
    TwoFactorSplit split;
    split.scale = 1.0;
    split.left = gamma_d.transpose();   // n x d
    split.right = dict.transpose();     // d x d residual
    return split;
  };

  hooks.post_global = [&](Index, std::vector<Matrix>& factors, double& lam) {
    // Re-code the coefficients against the current scaled dictionary.
    Matrix prod = factors[1];
    for (size_t j = 2; j < factors.size(); ++j) prod = prod * factors[j];
    const Matrix dict = lam * prod.transpose();  // d x d
    const OmpMatrixResult coded = omp_encode(dict, x, k_atoms);
    factors[0] = coded.gamma.to_dense().transpose();  // n x d
  };

  FactorizationReport best;
  for (round = 0; round < restarts; ++round) {
    FactorizationReport rep =
        hierarchical_factorize(x, schedule, cfg, q - 1, hooks, seed);
    if (round == 0 || rep.rmse_value < best.rmse_value) best = std::move(rep);
  }
  return best;
}

}  // namespace sparsefact
