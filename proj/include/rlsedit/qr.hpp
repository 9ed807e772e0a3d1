#pragma once

#include <cmath>
#include <cstddef>

#include "rlsedit/kernel.hpp"
#include "rlsedit/matrix.hpp"
#include "rlsedit/rls.hpp"
#include "rlsedit/stream.hpp"

namespace rlsedit {

/// Factored form of the same regularized least-squares problem rls-core
/// solves: RᵀR tracks S_t and R W = Bbar recovers the weights. Numerically
/// sturdier than the Woodbury recursion because the Gram matrix is never
/// squared explicitly.
struct QrState {
  UpperTriangular R;  // dk x dk, positive diagonal
  Matrix Bbar;        // dk x dv
  std::size_t t = 0;
  Penalties penalties;
  Matrix W0;  // retained for diagnostics and checkpoints
  AnchorDims anchor_dims;
  bool anchor_consistent = true;
};

inline QrState qr_init(const Matrix& w0, const Anchor& anchor,
                       const Penalties& penalties) {
  validate_penalties(penalties);
  validate_anchor_shapes(anchor);
  if (w0.rows() != anchor.dk() || w0.cols() != anchor.dv())
    throw ShapeMismatch("qr_init: W0 shape does not match anchor");

  QrState st;
  st.penalties = penalties;
  st.W0 = w0;
  st.anchor_dims = {anchor.n0(), anchor.dk(), anchor.dv()};
  st.anchor_consistent = anchor_consistent(anchor);
  try {
    st.R = cholesky(regularized_gram_base(anchor, penalties));
  } catch (const NotPositiveDefinite& e) {
    throw SingularInit(std::string("S0 is not positive definite: ") + e.what());
  }
  st.Bbar = st.R.to_matrix() * w0;
  return st;
}

/// Annihilates the appended key rows against R with Givens rotations,
/// column-major and bottom-up within each column, applying the identical
/// rotations to the stacked right-hand side [Bbar; V]. The rotated-out
/// right-hand-side rows carry only the residual and are discarded. The
/// rotation sign keeps the diagonal of R positive.
inline QrState qr_apply_edit(const QrState& state, const EditBatch& batch) {
  const std::size_t dk = state.anchor_dims.dk;
  const std::size_t dv = state.anchor_dims.dv;
  if (batch.K.cols() != dk || batch.V.cols() != dv ||
      batch.K.rows() != batch.V.rows() || batch.u() == 0)
    throw ShapeMismatch("qr_apply_edit: batch shape mismatch");

  QrState next = state;
  next.t = state.t + 1;
  Matrix k = batch.K;
  Matrix v = batch.V;
  const std::size_t u = batch.u();

  for (std::size_t j = 0; j < dk; ++j) {
    auto rj = next.R.row(j);
    auto bj = next.Bbar.row(j);
    for (std::size_t i = u; i-- > 0;) {
      auto ki = k.row(i);
      const double b = ki[j];
      if (b == 0.0) continue;  // zero rows leave the factor untouched
      const double a = rj[j];
      const double r = std::hypot(a, b);
      const double c = a / r;
      const double s = b / r;
      rj[j] = r;
      ki[j] = 0.0;
      for (std::size_t col = j + 1; col < dk; ++col) {
        const double rv = rj[col];
        const double kv = ki[col];
        rj[col] = c * rv + s * kv;
        ki[col] = -s * rv + c * kv;
      }
      auto vi = v.row(i);
      for (std::size_t col = 0; col < dv; ++col) {
        const double bv = bj[col];
        const double vv = vi[col];
        bj[col] = c * bv + s * vv;
        vi[col] = -s * bv + c * vv;
      }
    }
  }
  return next;
}

/// W_t from one triangular back-substitution per value column.
inline Matrix qr_weights(const QrState& state) {
  return solve_triangular(state.R, state.Bbar, Side::Upper);
}

} // namespace rlsedit
