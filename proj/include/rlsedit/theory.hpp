#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rlsedit/kernel.hpp"
#include "rlsedit/rls.hpp"
#include "rlsedit/stream.hpp"

namespace rlsedit {

enum class BoundKind {
  ParamDev,        // ||W_T - W0||_F vs (1/lambda^2) ||sum K_tᵀ(V_t - K_t W0)||_F
  MapDevBasic,     // ||K0 (W_T - W0)||_F vs (1/mu) sum ||R_t||_F
  MapDevAdaptive,  // same measure, adaptive spectral denominator
  MuLimit,         // D_T vs (1/mu) sqrt(sum ||K_i W0 - V_i||_F^2)
  LambdaLimit,     // P_T vs (1/lambda) sqrt(same)
};

inline const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::ParamDev: return "param_dev";
    case BoundKind::MapDevBasic: return "map_dev_basic";
    case BoundKind::MapDevAdaptive: return "map_dev_adaptive";
    case BoundKind::MuLimit: return "mu_limit";
    case BoundKind::LambdaLimit: return "lambda_limit";
  }
  return "unknown";
}

struct BoundReport {
  std::size_t step = 0;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - measured
  BoundKind kind = BoundKind::ParamDev;
};

inline BoundReport make_report(std::size_t step, double measured, double bound,
                               BoundKind kind) {
  return {step, measured, bound, bound - measured, kind};
}

/// Audit acceptance threshold: slack may dip to -tol_scale * (1 + bound)
/// before a report counts as a violation.
inline bool bound_holds(const BoundReport& r, double tol_scale = 1e-10) {
  return r.slack >= -tol_scale * (1.0 + r.bound);
}

/// Per-step statistics recorded during a forward pass; the map-deviation
/// bounds need the residual against W_{t-1}, which the final state alone
/// cannot reproduce.
struct StepStats {
  double residual_fro = 0.0;  // ||V_t - K_t W_{t-1}||_F
  double k_norm2 = 0.0;       // sigma_max(K_t)
  double k_floor_sq = 0.0;    // lambda_min(K_tᵀK_t); see gram_floor_sq
};

/// Smallest eigenvalue of KᵀK. This is what the spectral-floor argument
/// S_t ⪰ (...) I actually consumes: a batch with fewer rows than columns has
/// a rank-deficient Gram and contributes nothing to the floor, even though
/// its smallest min-dimension singular value is positive.
inline double gram_floor_sq(const Matrix& k) {
  if (k.rows() == 0) return 0.0;
  if (k.rows() < k.cols()) return 0.0;
  const double s = singular_extremes(k).second;
  return s * s;
}

inline void require_consistent_anchor(const Anchor& anchor) {
  if (!anchor_consistent(anchor))
    throw FlaggedAnchor("anchor condition K0 W0 = V0 is violated");
}

inline StepStats step_stats(const EditBatch& batch, const Matrix& w_prev) {
  StepStats s;
  s.residual_fro = (batch.V - batch.K * w_prev).frobenius_norm();
  const auto [hi, lo] = singular_extremes(batch.K);
  s.k_norm2 = hi;
  s.k_floor_sq = (batch.K.rows() >= batch.K.cols()) ? lo * lo : 0.0;
  return s;
}

/// (1/lambda^2) ||sum K_tᵀ(V_t - K_t W0)||_F, the parameter-deviation cap.
inline double param_bound_value(const Anchor& anchor, const Penalties& penalties,
                                std::span<const EditBatch> history) {
  if (penalties.lambda <= 0.0)
    throw LambdaZero("parameter-deviation bound requires lambda > 0");
  Matrix accum(anchor.dk(), anchor.dv());
  for (const EditBatch& b : history)
    accum += transpose_times(b.K, b.V - b.K * anchor.W0);
  return accum.frobenius_norm() / (penalties.lambda * penalties.lambda);
}

/// The unpenalized objective at the initial weights, sum ||K_i W0 - V_i||_F^2.
inline double phi_at_w0(const Anchor& anchor, std::span<const EditBatch> history) {
  double phi = 0.0;
  for (const EditBatch& b : history) {
    const double r = (b.K * anchor.W0 - b.V).frobenius_norm();
    phi += r * r;
  }
  return phi;
}

/// Parameter deviation ||W_T - W0||_F against its cap. measured uses the
/// exact minimizer from direct_solve.
inline BoundReport bound_param_deviation(const Anchor& anchor,
                                         const Penalties& penalties,
                                         std::span<const EditBatch> history) {
  if (penalties.lambda <= 0.0)
    throw LambdaZero("parameter-deviation bound requires lambda > 0");
  require_consistent_anchor(anchor);
  const Matrix w_t = direct_solve(anchor, penalties, history);
  const double measured = (w_t - anchor.W0).frobenius_norm();
  const double bound = param_bound_value(anchor, penalties, history);
  return make_report(history.size(), measured, bound, BoundKind::ParamDev);
}

/// Anchor-map deviation, basic and adaptive spectral variants, from recorded
/// per-step residuals. `measured` is ||K0 (W_final - W0)||_F; pass the
/// weights the trace was recorded against.
inline std::pair<BoundReport, BoundReport> bound_map_deviation(
    const Anchor& anchor, const Penalties& penalties,
    std::span<const StepStats> trace, const Matrix& w_final) {
  if (penalties.mu <= 0.0)
    throw MuZero("map-deviation bound requires mu > 0");
  require_consistent_anchor(anchor);

  double measured = 0.0;
  double k0_norm = 0.0;
  double k0_floor = 0.0;
  if (anchor.n0() > 0) {
    measured = (anchor.K0 * (w_final - anchor.W0)).frobenius_norm();
    k0_norm = singular_extremes(anchor.K0).first;
    k0_floor = gram_floor_sq(anchor.K0);
  }

  double basic = 0.0;
  double adaptive = 0.0;
  double denom = penalties.lambda * penalties.lambda +
                 penalties.mu * penalties.mu * k0_floor;
  for (const StepStats& s : trace) {
    basic += s.residual_fro / penalties.mu;
    denom += s.k_floor_sq;
    adaptive += k0_norm * s.k_norm2 * s.residual_fro / denom;
  }
  return {make_report(trace.size(), measured, basic, BoundKind::MapDevBasic),
          make_report(trace.size(), measured, adaptive,
                      BoundKind::MapDevAdaptive)};
}

/// Penalty-limit caps: D_T <= sqrt(Phi_T(W0))/mu and P_T <= sqrt(Phi_T(W0))/lambda
/// with Phi_T(W0) the unpenalized objective at the initial weights. A zero
/// penalty yields an infinite (vacuous) bound on that side.
inline std::pair<BoundReport, BoundReport> bound_hard_limits(
    const Anchor& anchor, const Penalties& penalties,
    std::span<const EditBatch> history) {
  require_consistent_anchor(anchor);
  const Matrix w_t = direct_solve(anchor, penalties, history);
  const double root_phi = std::sqrt(phi_at_w0(anchor, history));

  const double d_t =
      (anchor.n0() > 0)
          ? (anchor.K0 * (w_t - anchor.W0)).frobenius_norm()
          : 0.0;
  const double p_t = (w_t - anchor.W0).frobenius_norm();

  const double inf = std::numeric_limits<double>::infinity();
  const double mu_bound = penalties.mu > 0.0 ? root_phi / penalties.mu : inf;
  const double lam_bound =
      penalties.lambda > 0.0 ? root_phi / penalties.lambda : inf;
  return {make_report(history.size(), d_t, mu_bound, BoundKind::MuLimit),
          make_report(history.size(), p_t, lam_bound, BoundKind::LambdaLimit)};
}

/// Limit point of the editor under converging second moments:
///   W† = (Sigma_K + alpha I + beta K0ᵀK0)⁻¹ (Sigma_KV + alpha W0 + beta K0ᵀV0).
inline Matrix population_limit(const Anchor& anchor, const Matrix& w0,
                               double alpha, double beta, const Matrix& sigma_k,
                               const Matrix& sigma_kv) {
  if (alpha < 0.0 || beta < 0.0)
    throw UsageError("population_limit: negative regularizer");
  if (sigma_k.rows() != w0.rows() || sigma_k.cols() != w0.rows() ||
      sigma_kv.rows() != w0.rows() || sigma_kv.cols() != w0.cols())
    throw ShapeMismatch("population_limit: moment shapes");

  Matrix a = sigma_k;
  add_scaled_identity(a, alpha);
  Matrix b = sigma_kv + w0 * alpha;
  if (beta > 0.0 && anchor.n0() > 0) {
    a += gram(anchor.K0) * beta;
    b += transpose_times(anchor.K0, anchor.V0) * beta;
  }
  try {
    return spd_solve(a, b);
  } catch (const NotPositiveDefinite& e) {
    throw SingularSystem(std::string("population system singular: ") + e.what());
  }
}

} // namespace rlsedit
