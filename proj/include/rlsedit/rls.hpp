#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "rlsedit/kernel.hpp"
#include "rlsedit/matrix.hpp"
#include "rlsedit/stream.hpp"

namespace rlsedit {

/// Soft-constraint weights: lambda penalizes deviation from the initial
/// weights, mu penalizes deviation of the anchor mapping. The defaults
/// anchor hard; experiments should pass explicit values.
struct Penalties {
  double lambda = 3.0;
  double mu = 20000.0;
};

inline void validate_penalties(const Penalties& p) {
  if (p.lambda < 0.0 || p.mu < 0.0)
    throw UsageError("penalties must be nonnegative");
}

struct AnchorDims {
  std::size_t n0 = 0;
  std::size_t dk = 0;
  std::size_t dv = 0;
};

/// Editor state advanced by apply_edit. C is the inverse of the regularized
/// cumulative Gram S_t = lambda^2 I + mu^2 K0ᵀK0 + sum K_iᵀK_i; it stays
/// symmetric positive definite and never requires a dk x dk inverse to
/// maintain.
struct RlsState {
  Matrix W;  // dk x dv
  Matrix C;  // dk x dk
  std::size_t t = 0;
  Penalties penalties;
  Matrix W0;  // retained for diagnostics
  AnchorDims anchor_dims;
  // Set when the anchor failed K0 W0 = V0 at init; bound audits refuse
  // such states because the proofs assume the anchor condition.
  bool anchor_consistent = true;
};

/// lambda^2 I + mu^2 K0ᵀK0.
inline Matrix regularized_gram_base(const Anchor& anchor, const Penalties& p) {
  Matrix s = gram(anchor.K0);
  s *= p.mu * p.mu;
  add_scaled_identity(s, p.lambda * p.lambda);
  return s;
}

inline RlsState init_state(const Matrix& w0, const Anchor& anchor,
                           const Penalties& penalties) {
  validate_penalties(penalties);
  validate_anchor_shapes(anchor);
  if (w0.rows() != anchor.dk() || w0.cols() != anchor.dv())
    throw ShapeMismatch("init_state: W0 shape does not match anchor");

  RlsState st;
  st.penalties = penalties;
  st.W = w0;
  st.W0 = w0;
  st.anchor_dims = {anchor.n0(), anchor.dk(), anchor.dv()};
  st.anchor_consistent = anchor_consistent(anchor);

  const Matrix s0 = regularized_gram_base(anchor, penalties);
  try {
    st.C = spd_solve(s0, Matrix::identity(anchor.dk()));
  } catch (const NotPositiveDefinite& e) {
    throw SingularInit(std::string("S0 is not positive definite: ") + e.what());
  }
  symmetrize(st.C);
  return st;
}

/// One Woodbury step (covariance update then weight update). Only a u x u
/// Cholesky is factored; C is updated as C - Y Yᵀ and re-symmetrized to
/// suppress drift over long streams.
inline RlsState apply_edit(const RlsState& state, const EditBatch& batch) {
  if (batch.K.cols() != state.anchor_dims.dk ||
      batch.V.cols() != state.anchor_dims.dv ||
      batch.K.rows() != batch.V.rows() || batch.u() == 0)
    throw ShapeMismatch("apply_edit: batch shape mismatch");

  const Matrix f = times_transpose(state.C, batch.K);  // dk x u
  Matrix s_small = batch.K * f;                        // u x u
  add_scaled_identity(s_small, 1.0);

  UpperTriangular rc;
  try {
    rc = cholesky(s_small);
  } catch (const NotPositiveDefinite& e) {
    throw InnerNotPD(std::string("I + K F lost positive definiteness: ") +
                     e.what());
  } catch (const NotSymmetric& e) {
    throw InnerNotPD(std::string("I + K F lost symmetry: ") + e.what());
  }

  // Yᵀ = R_c⁻ᵀ Fᵀ, so C_t = C - Y Yᵀ and the gain G = F S⁻¹ = Y R_c⁻ᵀ.
  const Matrix yt = solve_triangular(rc, f.transpose(), Side::LowerTranspose);
  const Matrix gt = solve_triangular(rc, yt, Side::Upper);  // Gᵀ, u x dk

  RlsState next;
  next.penalties = state.penalties;
  next.W0 = state.W0;
  next.anchor_dims = state.anchor_dims;
  next.anchor_consistent = state.anchor_consistent;
  next.t = state.t + 1;

  next.C = state.C - transpose_times(yt, yt);
  symmetrize(next.C);

  const Matrix residual = batch.V - batch.K * state.W;
  next.W = state.W + transpose_times(gt, residual);
  return next;
}

/// Batch (non-recursive) minimizer; the oracle the recursion is checked
/// against. Forms S_t and T_t explicitly and solves once.
inline Matrix direct_solve(const Anchor& anchor, const Penalties& penalties,
                           std::span<const EditBatch> history) {
  validate_penalties(penalties);
  validate_anchor_shapes(anchor);
  Matrix s = regularized_gram_base(anchor, penalties);
  Matrix t = anchor.W0 * (penalties.lambda * penalties.lambda);
  if (anchor.n0() > 0)
    t += transpose_times(anchor.K0, anchor.V0) * (penalties.mu * penalties.mu);
  for (const EditBatch& b : history) {
    s += gram(b.K);
    t += transpose_times(b.K, b.V);
  }
  try {
    return spd_solve(s, t);
  } catch (const NotPositiveDefinite& e) {
    throw SingularSystem(std::string("S_t is singular: ") + e.what());
  }
}

/// The three objective components tracked over a run: current-edit fit,
/// parameter drift, anchor preservation. All squared Frobenius norms.
struct ObjectiveTerms {
  double edit_fit = 0.0;      // ||K_t W - V_t||_F^2
  double weight_drift = 0.0;  // ||W - W0||_F^2
  double anchor_drift = 0.0;  // ||K0 W - V0||_F^2, zero for an empty anchor
};

inline ObjectiveTerms objective_terms(const Matrix& w, const EditBatch& batch,
                                      const Matrix& w0, const Anchor& anchor) {
  if (batch.K.cols() != w.rows() || batch.V.cols() != w.cols() ||
      w0.rows() != w.rows() || w0.cols() != w.cols())
    throw ShapeMismatch("objective_terms: shape mismatch");
  ObjectiveTerms t;
  const double r1 = (batch.K * w - batch.V).frobenius_norm();
  t.edit_fit = r1 * r1;
  const double r2 = (w - w0).frobenius_norm();
  t.weight_drift = r2 * r2;
  if (anchor.n0() > 0) {
    if (anchor.K0.cols() != w.rows() || anchor.V0.cols() != w.cols())
      throw ShapeMismatch("objective_terms: anchor shape mismatch");
    const double r3 = (anchor.K0 * w - anchor.V0).frobenius_norm();
    t.anchor_drift = r3 * r3;
  }
  return t;
}

/// Full cumulative objective: sum of edit residuals plus both penalties.
inline double full_objective(const Anchor& anchor, const Penalties& penalties,
                             std::span<const EditBatch> history,
                             const Matrix& w) {
  validate_penalties(penalties);
  double total = 0.0;
  for (const EditBatch& b : history) {
    const double r = (b.K * w - b.V).frobenius_norm();
    total += r * r;
  }
  const double drift = (w - anchor.W0).frobenius_norm();
  total += penalties.lambda * penalties.lambda * drift * drift;
  if (anchor.n0() > 0) {
    const double ar = (anchor.K0 * w - anchor.V0).frobenius_norm();
    total += penalties.mu * penalties.mu * ar * ar;
  }
  return total;
}

} // namespace rlsedit
