#pragma once

#include "sparsefact/hierarchy.hpp"
#include "sparsefact/rng.hpp"

namespace sparsefact {

enum class DictKind {
  Factorized,  // product of sparse full-rank square factors
  Gaussian,    // dense i.i.d. standard normal entries
};

struct SynthSpec {
  Index d = 32;
  Index n = 500;
  Index atoms_per_sample = 5;
  DictKind kind = DictKind::Factorized;
  Index factor_count = 5;             // factors in the Factorized product
  Index nnz_min = 64, nnz_max = 128;  // per-factor entry count range
};

struct SynthDictionary {
  Matrix d0;                   // d x d ground-truth dictionary
  std::vector<Matrix> factors; // the generating factors (Factorized only)
};

// Ground-truth dictionary.  Factorized: factor_count square factors, each
// with a uniform entry count in [nnz_min, nnz_max] and standard normal
// values; the support is a random permutation (one entry per row and
// column) plus uniformly placed extras, and factors as well as the final
// product are resampled (at most 100 times each) until full rank so the
// product spans the signal space.
SynthDictionary synth_dictionary(const SynthSpec& spec, Rng& rng);

struct SynthData {
  Matrix x;         // d0 * gamma0, exactly k atoms per sample
  CooMatrix gamma0; // ground-truth coefficients
};

SynthData synth_training_data(const Matrix& d0, Index n, Index k, Rng& rng);

// Numerical rank by Gaussian elimination with partial pivoting; a pivot
// below tol ends the elimination.
Index elimination_rank(Matrix m, double tol = 1e-10);

struct OmpResult {
  Vector coeffs;               // dense length-a coefficient vector
  std::vector<Index> support;  // atoms in selection order
  double residual_norm = 0.0;
  bool rank_deficient = false; // least-norm refit was needed at some step
};

// Orthogonal matching pursuit: k rounds of picking the atom with the largest
// normalized absolute correlation against the current residual (ties toward
// the smaller index, zero columns skipped), refitting all selected
// coefficients by least squares, and updating the residual.  Stops early
// when the residual is numerically zero or no atom correlates.
OmpResult omp_encode(const Matrix& dict, const Vector& x, Index k);

struct OmpMatrixResult {
  CooMatrix gamma;  // a x n coefficients, one omp_encode per column
  Index rank_deficient_columns = 0;
};

OmpMatrixResult omp_encode(const Matrix& dict, const Matrix& x, Index k);

// Hierarchical right-peeling factorization of d x n training data into q-1
// square dictionary factors and a coefficient matrix, with two departures
// from the plain schedule: the first split is seeded by coding the data
// against an orthonormal basis of its column space (one OMP pass plus a
// least-squares dictionary refit), and the coefficient matrix is re-coded by
// OMP against the current dictionary after every global refinement.
// The whole pipeline is restarted `restarts` times (the first run keeps the
// plain basis, later ones rotate it by a seeded random orthogonal mix) and
// the run with the lowest final coding error wins; everything is
// deterministic in X and seed.
FactorizationReport proposed_learn(const Matrix& x, Index q, Index p,
                                   Index cap, const PalmConfig& cfg,
                                   std::uint64_t seed,
                                   Index k_atoms = 5, int restarts = 3);

}  // namespace sparsefact
