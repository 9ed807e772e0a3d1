#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rlsedit/rls.hpp"
#include "rlsedit/stream.hpp"
#include "rlsedit/theory.hpp"

using namespace rlsedit;

namespace {

Anchor empty_anchor(Matrix w0) {
  Anchor a;
  a.K0 = Matrix(0, w0.rows());
  a.V0 = Matrix(0, w0.cols());
  a.W0 = std::move(w0);
  return a;
}

Anchor make_anchor(Matrix k0, Matrix w0) {
  Anchor a;
  a.V0 = k0 * w0;
  a.K0 = std::move(k0);
  a.W0 = std::move(w0);
  return a;
}

EditBatch scalar_edit(double k, double v, std::size_t step) {
  return {Matrix({{k}}), Matrix({{v}}), step};
}

struct StreamCase {
  Anchor anchor;
  std::vector<EditBatch> batches;
  Penalties penalties;
};

StreamCase random_case(std::uint64_t seed, std::size_t dk, std::size_t dv,
               std::size_t n0, std::size_t u, std::size_t steps,
               Penalties pen, double noise = 0.3) {
  StreamCase r;
  r.anchor = gen_anchor(dk, dv, n0, seed);
  r.penalties = pen;
  StreamSpec s;
  s.dk = dk;
  s.dv = dv;
  s.u = u;
  s.steps = steps;
  s.noise_scale = noise;
  s.seed = seed + 1;
  s.ground_truth = gen_anchor(dk, dv, 0, seed + 2).W0;
  r.batches = gen_stream(s);
  return r;
}

/// Forward pass over direct solves, recording the per-step statistics the
/// map-deviation bounds consume.
std::pair<std::vector<StepStats>, Matrix> direct_trace(const StreamCase& r) {
  std::vector<StepStats> trace;
  std::span<const EditBatch> hist(r.batches);
  Matrix w_prev = direct_solve(r.anchor, r.penalties, hist.first(0));
  for (std::size_t t = 1; t <= r.batches.size(); ++t) {
    trace.push_back(step_stats(r.batches[t - 1], w_prev));
    w_prev = direct_solve(r.anchor, r.penalties, hist.first(t));
  }
  return {std::move(trace), std::move(w_prev)};
}

} // namespace

TEST(ParamDeviation, EmptyHistoryIsZero) {
  const Anchor a = make_anchor(Matrix({{1.0}}), Matrix({{2.0}}));
  const BoundReport r = bound_param_deviation(a, {1.0, 1.0}, {});
  EXPECT_NEAR(r.measured, 0.0, 1e-12);
  EXPECT_EQ(r.bound, 0.0);
  EXPECT_EQ(r.kind, BoundKind::ParamDev);
}

TEST(ParamDeviation, ScalarHandValues) {
  const Anchor a = empty_anchor(Matrix({{0.0}}));
  const std::vector<EditBatch> hist = {scalar_edit(1.0, 1.0, 1)};
  const BoundReport r = bound_param_deviation(a, {1.0, 0.0}, hist);
  EXPECT_NEAR(r.measured, 0.5, 1e-12);
  EXPECT_NEAR(r.bound, 1.0, 1e-12);
  EXPECT_NEAR(r.slack, 0.5, 1e-12);
  EXPECT_TRUE(bound_holds(r));
}

TEST(ParamDeviation, RequiresPositiveLambdaAndConsistentAnchor) {
  const Anchor a = make_anchor(Matrix({{1.0}}), Matrix({{2.0}}));
  EXPECT_THROW(bound_param_deviation(a, {0.0, 1.0}, {}), LambdaZero);
  Anchor broken = a;
  broken.V0(0, 0) += 1.0;
  EXPECT_THROW(bound_param_deviation(broken, {1.0, 1.0}, {}), FlaggedAnchor);
}

TEST(ParamDeviation, HoldsOnRandomStreams) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const StreamCase r = random_case(700 + seed, 6, 2, 4, 2, 15, {0.5 + 0.2 * seed, 2.0});
    const BoundReport rep =
        bound_param_deviation(r.anchor, r.penalties, r.batches);
    EXPECT_TRUE(bound_holds(rep)) << "seed " << seed << " slack " << rep.slack;
  }
}

TEST(MapDeviation, ScalarAnchoredHandValues) {
  const Anchor a = make_anchor(Matrix({{1.0}}), Matrix({{2.0}}));
  const Penalties pen{0.0, 1.0};
  StreamCase r{a, {scalar_edit(1.0, 4.0, 1)}, pen};
  const auto [trace, w_final] = direct_trace(r);
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_NEAR(trace[0].residual_fro, 2.0, 1e-12);

  const auto [basic, adaptive] = bound_map_deviation(a, pen, trace, w_final);
  EXPECT_NEAR(basic.measured, 1.0, 1e-12);
  EXPECT_NEAR(basic.bound, 2.0, 1e-12);
  EXPECT_TRUE(bound_holds(basic));
  EXPECT_TRUE(bound_holds(adaptive));
}

TEST(MapDeviation, ZeroResidualStreamGivesZeroEverything) {
  const Anchor a = gen_anchor(4, 2, 4, 80);
  StreamSpec s;
  s.dk = 4;
  s.dv = 2;
  s.u = 2;
  s.steps = 10;
  s.noise_scale = 0.0;
  s.seed = 81;
  s.ground_truth = a.W0;  // every edit already satisfied by W0
  const StreamCase r{a, gen_stream(s), Penalties{1.0, 2.0}};
  const auto [trace, w_final] = direct_trace(r);
  const auto [basic, adaptive] =
      bound_map_deviation(a, r.penalties, trace, w_final);
  EXPECT_NEAR(basic.measured, 0.0, 1e-10);
  EXPECT_NEAR(basic.bound, 0.0, 1e-10);
  EXPECT_NEAR(adaptive.bound, 0.0, 1e-10);
}

TEST(MapDeviation, RequiresPositiveMu) {
  const Anchor a = make_anchor(Matrix({{1.0}}), Matrix({{2.0}}));
  EXPECT_THROW(bound_map_deviation(a, {1.0, 0.0}, {}, a.W0), MuZero);
}

TEST(MapDeviation, BothVariantsHoldOnRandomAnchoredStreams) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const StreamCase r =
        random_case(800 + seed, 5, 2, 5 + seed % 3, 2, 12, {1.0, 0.5 + seed});
    const auto [trace, w_final] = direct_trace(r);
    const auto [basic, adaptive] =
        bound_map_deviation(r.anchor, r.penalties, trace, w_final);
    EXPECT_TRUE(bound_holds(basic)) << "seed " << seed;
    EXPECT_TRUE(bound_holds(adaptive)) << "seed " << seed;
  }
}

TEST(HardLimits, BoundsScaleExactlyWithPenalty) {
  const StreamCase base = random_case(900, 4, 2, 4, 2, 10, {1.0, 1.0});
  double prev_bound = 0.0;
  for (double mu : {1.0, 10.0, 100.0, 1000.0}) {
    const Penalties pen{1.0, mu};
    const auto [mu_rep, lam_rep] = bound_hard_limits(base.anchor, pen, base.batches);
    EXPECT_TRUE(bound_holds(mu_rep)) << "mu " << mu;
    EXPECT_TRUE(bound_holds(lam_rep));
    if (mu > 1.0) {
      EXPECT_DOUBLE_EQ(mu_rep.bound, prev_bound / 10.0);
    }
    prev_bound = mu_rep.bound;
  }
}

TEST(HardLimits, PlugInArithmeticForLargeLambda) {
  // One scalar edit with residual 2 at W0: Phi = 4, so P_T <= 2e-3 at
  // lambda = 1000.
  const Anchor a = empty_anchor(Matrix({{1.0}}));
  const std::vector<EditBatch> hist = {scalar_edit(1.0, 3.0, 1)};
  const auto [mu_rep, lam_rep] = bound_hard_limits(a, {1000.0, 0.0}, hist);
  EXPECT_DOUBLE_EQ(lam_rep.bound, 2.0 / 1000.0);
  EXPECT_TRUE(bound_holds(lam_rep));
  EXPECT_TRUE(std::isinf(mu_rep.bound));
}

TEST(HardLimits, NoiselessAlignedStreamHasZeroDeviation) {
  const Anchor a = gen_anchor(4, 2, 4, 91);
  StreamSpec s;
  s.dk = 4;
  s.dv = 2;
  s.u = 2;
  s.steps = 8;
  s.noise_scale = 0.0;
  s.seed = 92;
  s.ground_truth = a.W0;
  const auto [mu_rep, lam_rep] = bound_hard_limits(a, {1.0, 1.0}, gen_stream(s));
  EXPECT_NEAR(mu_rep.measured, 0.0, 1e-10);
  EXPECT_NEAR(lam_rep.measured, 0.0, 1e-10);
  EXPECT_NEAR(mu_rep.bound, 0.0, 1e-12);
}

TEST(PopulationLimit, UnregularizedRecoversGroundTruth) {
  const Anchor a = gen_anchor(4, 2, 0, 93);
  auto rng = oracle::make_rng(94);
  const Matrix w_star = oracle::random_matrix(rng, 4, 2);
  const Matrix sigma_k = oracle::random_spd(rng, 4);
  const Matrix w = population_limit(a, a.W0, 0.0, 0.0, sigma_k, sigma_k * w_star);
  EXPECT_LE(oracle::rel_err(w, w_star), 1e-10);
}

TEST(PopulationLimit, ScalarRidgeValue) {
  const Anchor a = empty_anchor(Matrix({{0.0}}));
  const Matrix w = population_limit(a, Matrix({{0.0}}), 1.0, 0.0,
                                    Matrix({{1.0}}), Matrix({{1.0}}));
  EXPECT_NEAR(w(0, 0), 0.5, 1e-15);
}

TEST(PopulationLimit, LargeBetaEnforcesAnchor) {
  const Anchor a = make_anchor(Matrix({{1.0}}), Matrix({{2.0}}));
  const Matrix w = population_limit(a, a.W0, 0.0, 1e6, Matrix({{1.0}}),
                                    Matrix({{5.0}}));
  EXPECT_NEAR(w(0, 0), 2.0, 1e-5);
}

TEST(Telescoping, StepNormsDominateTotalAnchorMotion) {
  const StreamCase r = random_case(950, 5, 2, 5, 2, 10, {1.0, 2.0});
  std::span<const EditBatch> hist(r.batches);
  Matrix w_prev = direct_solve(r.anchor, r.penalties, hist.first(0));
  double step_sum = 0.0;
  Matrix w_now = w_prev;
  for (std::size_t t = 1; t <= r.batches.size(); ++t) {
    w_now = direct_solve(r.anchor, r.penalties, hist.first(t));
    step_sum += (r.anchor.K0 * (w_now - w_prev)).frobenius_norm();
    w_prev = w_now;
  }
  const double total = (r.anchor.K0 * (w_now - r.anchor.W0)).frobenius_norm();
  EXPECT_GE(step_sum, total - 1e-10);
}

TEST(GramFloor, WideBatchesContributeNothing) {
  auto rng = oracle::make_rng(96);
  const Matrix wide = oracle::random_matrix(rng, 2, 5);
  EXPECT_EQ(gram_floor_sq(wide), 0.0);
  const Matrix tall = oracle::random_matrix(rng, 6, 3);
  const auto evs = oracle::sym_eigenvalues(gram(tall));
  EXPECT_NEAR(gram_floor_sq(tall), evs.front(), 1e-8 * (1.0 + evs.back()));
  EXPECT_EQ(gram_floor_sq(Matrix(0, 4)), 0.0);
}
