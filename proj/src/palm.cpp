#include "sparsefact/palm.hpp"

#include "sparsefact/metrics.hpp"
#include "sparsefact/spectral.hpp"

#include <Eigen/SparseCore>

#include <cmath>

namespace sparsefact {

namespace {

bool is_identity(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

double density(const Matrix& m) {
  Index nnz = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  return m.size() ? static_cast<double>(nnz) / static_cast<double>(m.size())
                  : 0.0;
}

// Product that skips identity operands and routes through a compressed
// representation when one side is sparse enough for that to pay off.  The
// chains this solver works with are products of projected (hence sparse)
// factors, so this keeps the per-iteration cost near the stored-entry count
// instead of the dense cube.
Matrix mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("mul: shape mismatch");
  if (is_identity(a)) return b;
  if (is_identity(b)) return a;
  const double da = density(a);
  const double db = density(b);
  if (da <= 0.25 || db <= 0.25) {
    if (da <= db) {
      Eigen::SparseMatrix<double> sa = a.sparseView();
      return sa * b;
    }
    Eigen::SparseMatrix<double> sb = b.sparseView();
    return a * sb;
  }
  return a * b;
}

Matrix chain_product(const std::vector<Matrix>& factors) {
  Matrix p = factors.back();
  for (size_t j = factors.size() - 1; j-- > 0;) p = mul(factors[j], p);
  return p;
}

bool finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

double objective(const Matrix& x, const std::vector<Matrix>& factors,
                 double scale) {
  if (factors.empty()) throw std::invalid_argument("objective: no factors");
  const Matrix p = chain_product(factors);
  if (p.rows() != x.rows() || p.cols() != x.cols())
    throw std::invalid_argument("objective: shape mismatch");
  return 0.5 * (x - scale * p).squaredNorm();
}

double objective(const Matrix& x, const std::vector<CooMatrix>& factors,
                 double scale) {
  std::vector<Matrix> dense;
  dense.reserve(factors.size());
  for (const CooMatrix& f : factors) dense.push_back(f.to_dense());
  return objective(x, dense, scale);
}

Matrix gradient_factor(const Matrix& x, const Matrix& l, const Matrix& r,
                       const Matrix& s, double scale) {
  if (l.cols() != s.rows() || s.cols() != r.rows() || l.rows() != x.rows() ||
      r.cols() != x.cols())
    throw std::invalid_argument("gradient_factor: shape mismatch");
  const Matrix e = scale * mul(l, mul(s, r)) - x;
  return scale * mul(mul(l.transpose(), e), r.transpose());
}

double lipschitz_modulus(const Matrix& l, const Matrix& r, double scale,
                         double spectral_tol, double min_modulus) {
  const double sl = spectral_norm(l, spectral_tol);
  const double sr = spectral_norm(r, spectral_tol);
  const double m = scale * scale * sl * sl * sr * sr;
  return std::max(m, min_modulus);
}

Matrix update_factor(const Matrix& x, const Matrix& l, const Matrix& r,
                     const Matrix& s, double scale, const ConstraintSet& set,
                     const PalmConfig& cfg) {
  const double c = (1.0 + cfg.step_margin) *
                   lipschitz_modulus(l, r, scale, cfg.spectral_tol,
                                     cfg.min_modulus);
  const Matrix target = s - gradient_factor(x, l, r, s, scale) / c;
  const auto projected = set.project(target);
  return projected ? *projected : s;
}

std::optional<double> update_scale(const Matrix& x, const Matrix& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols())
    throw std::invalid_argument("update_scale: shape mismatch");
  const double denom = frobenius_inner(xhat, xhat);
  if (denom == 0.0) return std::nullopt;
  return frobenius_inner(x, xhat) / denom;
}

PalmState identity_init(const std::vector<ConstraintSet>& sets) {
  PalmState st;
  st.scale = 1.0;
  for (const ConstraintSet& set : sets) {
    Matrix eye = Matrix::Identity(set.rows(), set.cols());
    auto p = set.project(eye);
    if (!p)
      throw std::invalid_argument("identity_init: degenerate projection");
    st.factors.push_back(CooMatrix::from_dense(*p));
  }
  return st;
}

PalmState palm_factorize(const Matrix& x, const std::vector<ConstraintSet>& sets,
                         PalmState init, const PalmConfig& cfg) {
  const size_t q = sets.size();
  if (q == 0) throw std::invalid_argument("palm_factorize: no constraint sets");
  if (sets.front().rows() != x.rows() || sets.back().cols() != x.cols())
    throw std::invalid_argument("palm_factorize: sets do not match data shape");
  for (size_t j = 0; j + 1 < q; ++j)
    if (sets[j].cols() != sets[j + 1].rows())
      throw std::invalid_argument("palm_factorize: set shapes do not chain");
  if (cfg.max_iter < 1)
    throw std::invalid_argument("palm_factorize: max_iter must be positive");
  if (!x.allFinite())
    throw std::invalid_argument("palm_factorize: data has non-finite entries");

  if (init.factors.empty()) init = identity_init(sets);
  if (init.factors.size() != q)
    throw std::invalid_argument("palm_factorize: init factor count mismatch");
  std::vector<Matrix> f;
  f.reserve(q);
  for (size_t j = 0; j < q; ++j) {
    if (init.factors[j].rows() != sets[j].rows() ||
        init.factors[j].cols() != sets[j].cols())
      throw std::invalid_argument("palm_factorize: init factor shape mismatch");
    f.push_back(init.factors[j].to_dense());
  }

  double scale = init.scale;
  if (!std::isfinite(scale))
    throw std::invalid_argument("palm_factorize: non-finite init scale");

  PalmState st;
  st.scale = scale;
  const double dn = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
  double prev_err = -1.0;

  auto abort = [&](const char* what) -> void {
    PalmState partial;
    partial.scale = st.scale;
    partial.iterations = st.iterations;
    partial.objective_trace = st.objective_trace;
    throw NumericalAbort(what, std::move(partial));
  };

  for (int outer = 1; outer <= cfg.max_iter; ++outer) {
    // Suffix products of the not-yet-updated factors; rsuf[j] multiplies
    // everything to the right of factor j.
    std::vector<Matrix> rsuf(q);
    rsuf[q - 1] = Matrix::Identity(x.cols(), x.cols());
    for (size_t j = q - 1; j-- > 0;) rsuf[j] = mul(f[j + 1], rsuf[j + 1]);

    Matrix left = Matrix::Identity(x.rows(), x.rows());
    for (size_t j = 0; j < q; ++j) {
      f[j] = update_factor(x, left, rsuf[j], f[j], scale, sets[j], cfg);
      if (!finite(f[j])) abort("palm_factorize: non-finite factor");
      if (cfg.block_observer) {
        const double obj =
            0.5 * (x - scale * mul(left, mul(f[j], rsuf[j]))).squaredNorm();
        cfg.block_observer(outer, static_cast<int>(j), f[j], obj);
      }
      left = mul(left, f[j]);
    }

    // After the sweep `left` is the full product of the updated factors.
    if (auto s = update_scale(x, left)) scale = *s;
    if (!std::isfinite(scale)) abort("palm_factorize: non-finite scale");

    const double obj = 0.5 * (x - scale * left).squaredNorm();
    if (!std::isfinite(obj)) abort("palm_factorize: non-finite objective");
    st.iterations = outer;
    st.scale = scale;
    st.objective_trace.push_back(obj);

    const double err = std::sqrt(2.0 * obj / dn);
    if (prev_err >= 0.0 && std::abs(err - prev_err) < cfg.obj_tol) break;
    prev_err = err;
  }

  st.factors.clear();
  st.factors.reserve(q);
  for (const Matrix& m : f) st.factors.push_back(CooMatrix::from_dense(m));
  return st;
}

}  // namespace sparsefact
