#pragma once

#include <cmath>
#include <cstddef>

#include "rlsedit/kernel.hpp"
#include "rlsedit/matrix.hpp"

namespace rlsedit {

/// Orthogonal projector onto the null space of a preserved key set:
/// P = I - Q Qᵀ with Q an orthonormal basis of Row(K_pres). Idempotent,
/// symmetric, and annihilating (K_pres P = 0) up to rank truncation.
struct Projector {
  Matrix P;                     // dk x dk
  std::size_t source_rank = 0;  // numerical rank of the preserved key set
};

inline Projector nullspace_projector(const Matrix& k_pres, double rank_tol) {
  const std::size_t dk = k_pres.cols();
  Projector out;
  if (k_pres.rows() == 0 || dk == 0) {
    out.P = Matrix::identity(dk);
    return out;
  }
  const Matrix g = gram(k_pres);
  const SymEigen eig = jacobi_eigen(g);
  const double sigma_max = std::sqrt(std::max(0.0, eig.values.back()));
  const double cutoff = rank_tol * sigma_max;

  // Columns of eig.vectors with singular value above the cutoff span Row(K).
  std::size_t first_kept = dk;
  for (std::size_t i = 0; i < dk; ++i) {
    const double sigma = std::sqrt(std::max(0.0, eig.values[i]));
    if (sigma > cutoff && sigma > 0.0) {
      first_kept = i;
      break;
    }
  }
  out.source_rank = dk - first_kept;
  Matrix q(dk, out.source_rank);
  for (std::size_t i = first_kept; i < dk; ++i)
    for (std::size_t r = 0; r < dk; ++r) q(r, i - first_kept) = eig.vectors(r, i);
  out.P = Matrix::identity(dk) - times_transpose(q, q);
  symmetrize(out.P);
  return out;
}

/// ROME-style hard write: min ||K_bg Δ||_F^2 subject to K_e (W + Δ) = V_e,
/// via Δ = C K_eᵀ (K_e C K_eᵀ)⁻¹ (V_e - K_e W) with C = (K_bgᵀK_bg + εI)⁻¹.
/// The ε ridge (1e-10 · trace(K_bgᵀK_bg)/dk) tolerates rank-deficient
/// backgrounds.
inline Matrix hard_write_step(const Matrix& w, const Matrix& k_bg,
                              const Matrix& k_e, const Matrix& v_e) {
  const std::size_t dk = w.rows();
  if (k_bg.cols() != dk || k_e.cols() != dk || v_e.cols() != w.cols() ||
      k_e.rows() != v_e.rows() || k_e.rows() == 0)
    throw ShapeMismatch("hard_write_step: shape mismatch");

  Matrix g = gram(k_bg);
  const double eps = 1e-10 * g.trace() / static_cast<double>(dk);
  add_scaled_identity(g, eps);

  const Matrix x = spd_solve(g, k_e.transpose());  // C K_eᵀ, dk x m
  Matrix inner = k_e * x;                          // K_e C K_eᵀ, m x m
  symmetrize(inner);
  UpperTriangular rc;
  try {
    rc = cholesky(inner);
  } catch (const NotPositiveDefinite& e) {
    throw RankDeficientEdit(std::string("edit keys are rank deficient: ") +
                            e.what());
  }
  const Matrix rhs = v_e - k_e * w;
  const Matrix z = solve_triangular(rc, solve_triangular(rc, rhs, Side::LowerTranspose),
                                    Side::Upper);
  return w + x * z;
}

/// MEMIT-style batched soft write:
/// argmin ||K0 W - V0||^2 + ||K_e W - V_e||^2 + ridge ||W - W_prev||^2.
inline Matrix memit_step(const Matrix& w_prev, const Matrix& k0, const Matrix& v0,
                         const Matrix& k_e, const Matrix& v_e, double ridge) {
  const std::size_t dk = w_prev.rows();
  if (k0.cols() != dk || k_e.cols() != dk || v0.cols() != w_prev.cols() ||
      v_e.cols() != w_prev.cols() || k0.rows() != v0.rows() ||
      k_e.rows() != v_e.rows() || ridge < 0.0)
    throw ShapeMismatch("memit_step: shape mismatch");

  Matrix s = gram(k0) + gram(k_e);
  add_scaled_identity(s, ridge);
  Matrix t = transpose_times(k0, v0) + transpose_times(k_e, v_e);
  t += w_prev * ridge;
  try {
    return spd_solve(s, t);
  } catch (const NotPositiveDefinite& e) {
    throw SingularSystem(std::string("memit normal equations singular: ") +
                         e.what());
  }
}

/// AlphaEdit-style projected update in the Gram convention:
///   Δ = P (K_pᵀK_p P + K_eᵀK_e P + I)⁻¹ K_eᵀ (V_e - K_e W_prev).
/// With G = K_pᵀK_p + K_eᵀK_e and N = P G P + I, the identity N P = P (G P + I)
/// gives Δ = N⁻¹ P K_eᵀ (V_e - K_e W_prev); N is symmetric positive definite,
/// and Δ lies in Range(P), so preserved keys are annihilated by construction.
inline Matrix alphaedit_step(const Matrix& w_prev, const Projector& projector,
                             const Matrix& k_p, const Matrix& k_e,
                             const Matrix& v_e) {
  const std::size_t dk = w_prev.rows();
  if (projector.P.rows() != dk || projector.P.cols() != dk ||
      k_e.cols() != dk || v_e.cols() != w_prev.cols() ||
      k_e.rows() != v_e.rows() || (k_p.rows() > 0 && k_p.cols() != dk))
    throw ShapeMismatch("alphaedit_step: shape mismatch");

  Matrix g = gram(k_e);
  if (k_p.rows() > 0) g += gram(k_p);
  Matrix n = projector.P * g * projector.P;
  symmetrize(n);
  add_scaled_identity(n, 1.0);

  const Matrix residual = v_e - k_e * w_prev;
  const Matrix rhs = projector.P * transpose_times(k_e, residual);
  try {
    return w_prev + spd_solve(n, rhs);
  } catch (const NotPositiveDefinite& e) {
    throw SingularSystem(std::string("projected system singular: ") + e.what());
  }
}

} // namespace rlsedit
