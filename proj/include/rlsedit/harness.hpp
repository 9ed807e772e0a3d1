#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "rlsedit/baselines.hpp"
#include "rlsedit/checkpoint.hpp"
#include "rlsedit/metrics.hpp"
#include "rlsedit/qr.hpp"
#include "rlsedit/rls.hpp"
#include "rlsedit/stream.hpp"
#include "rlsedit/svg.hpp"
#include "rlsedit/theory.hpp"

namespace rlsedit {

enum class EditorKind { Rls, Qr, AlphaEdit, Memit, HardWrite };

inline const char* editor_name(EditorKind k) {
  switch (k) {
    case EditorKind::Rls: return "rls";
    case EditorKind::Qr: return "qr";
    case EditorKind::AlphaEdit: return "alphaedit";
    case EditorKind::Memit: return "memit";
    case EditorKind::HardWrite: return "hardwrite";
  }
  return "unknown";
}

inline EditorKind parse_editor(const std::string& s) {
  if (s == "rls") return EditorKind::Rls;
  if (s == "qr") return EditorKind::Qr;
  if (s == "alphaedit") return EditorKind::AlphaEdit;
  if (s == "memit") return EditorKind::Memit;
  if (s == "hardwrite") return EditorKind::HardWrite;
  throw UsageError("unknown editor '" + s + "'");
}

/// Uniform stepping interface over the five editors. States are advanced
/// sequentially (single writer); drivers are not shared across threads.
class EditorDriver {
public:
  virtual ~EditorDriver() = default;
  virtual Matrix weights() const = 0;
  virtual void step(const EditBatch& batch) = 0;
  virtual Checkpoint checkpoint() const = 0;
  virtual void restore(const Checkpoint& c,
                       std::span<const EditBatch> prefix) = 0;
};

namespace harness_detail {

class RlsDriver final : public EditorDriver {
public:
  RlsDriver(const Anchor& anchor, const Penalties& pen)
      : anchor_(anchor), state_(init_state(anchor.W0, anchor, pen)) {}
  Matrix weights() const override { return state_.W; }
  void step(const EditBatch& b) override { state_ = apply_edit(state_, b); }
  Checkpoint checkpoint() const override { return to_checkpoint(state_); }
  void restore(const Checkpoint& c, std::span<const EditBatch>) override {
    state_ = rls_from_checkpoint(c, anchor_);
  }
  const RlsState& state() const { return state_; }

private:
  Anchor anchor_;
  RlsState state_;
};

class QrDriver final : public EditorDriver {
public:
  QrDriver(const Anchor& anchor, const Penalties& pen)
      : anchor_(anchor), state_(qr_init(anchor.W0, anchor, pen)) {}
  Matrix weights() const override { return qr_weights(state_); }
  void step(const EditBatch& b) override { state_ = qr_apply_edit(state_, b); }
  Checkpoint checkpoint() const override { return to_checkpoint(state_); }
  void restore(const Checkpoint& c, std::span<const EditBatch>) override {
    state_ = qr_from_checkpoint(c, anchor_);
  }

private:
  Anchor anchor_;
  QrState state_;
};

class AlphaEditDriver final : public EditorDriver {
public:
  AlphaEditDriver(const Anchor& anchor, double rank_tol)
      : w_(anchor.W0),
        w0_(anchor.W0),
        projector_(nullspace_projector(anchor.K0, rank_tol)),
        k_past_(0, anchor.dk()) {}
  Matrix weights() const override { return w_; }
  void step(const EditBatch& b) override {
    w_ = alphaedit_step(w_, projector_, k_past_, b.K, b.V);
    k_past_ = vstack(k_past_, b.K);
  }
  Checkpoint checkpoint() const override {
    return {CheckpointMode::WeightsOnly, 0, Penalties{0.0, 0.0}, w_, Matrix(),
            w0_};
  }
  void restore(const Checkpoint& c, std::span<const EditBatch> prefix) override {
    if (c.mode != CheckpointMode::WeightsOnly)
      throw ModeMismatch("checkpoint is not a weights-only state");
    w_ = c.block_a;
    k_past_ = Matrix(0, w_.rows());
    for (const EditBatch& b : prefix) k_past_ = vstack(k_past_, b.K);
  }

private:
  Matrix w_, w0_;
  Projector projector_;
  Matrix k_past_;
};

class MemitDriver final : public EditorDriver {
public:
  MemitDriver(const Anchor& anchor, double ridge)
      : w_(anchor.W0), w0_(anchor.W0), k0_(anchor.K0), v0_(anchor.V0),
        ridge_(ridge) {}
  Matrix weights() const override { return w_; }
  void step(const EditBatch& b) override {
    w_ = memit_step(w_, k0_, v0_, b.K, b.V, ridge_);
  }
  Checkpoint checkpoint() const override {
    return {CheckpointMode::WeightsOnly, 0, Penalties{0.0, 0.0}, w_, Matrix(),
            w0_};
  }
  void restore(const Checkpoint& c, std::span<const EditBatch>) override {
    if (c.mode != CheckpointMode::WeightsOnly)
      throw ModeMismatch("checkpoint is not a weights-only state");
    w_ = c.block_a;
  }

private:
  Matrix w_, w0_, k0_, v0_;
  double ridge_;
};

class HardWriteDriver final : public EditorDriver {
public:
  explicit HardWriteDriver(const Anchor& anchor)
      : w_(anchor.W0), w0_(anchor.W0), k0_(anchor.K0) {}
  Matrix weights() const override { return w_; }
  void step(const EditBatch& b) override {
    w_ = hard_write_step(w_, k0_, b.K, b.V);
  }
  Checkpoint checkpoint() const override {
    return {CheckpointMode::WeightsOnly, 0, Penalties{0.0, 0.0}, w_, Matrix(),
            w0_};
  }
  void restore(const Checkpoint& c, std::span<const EditBatch>) override {
    if (c.mode != CheckpointMode::WeightsOnly)
      throw ModeMismatch("checkpoint is not a weights-only state");
    w_ = c.block_a;
  }

private:
  Matrix w_, w0_, k0_;
};

} // namespace harness_detail

inline std::unique_ptr<EditorDriver> make_driver(EditorKind kind,
                                                 const Anchor& anchor,
                                                 const Penalties& pen,
                                                 double ridge,
                                                 double rank_tol) {
  switch (kind) {
    case EditorKind::Rls:
      return std::make_unique<harness_detail::RlsDriver>(anchor, pen);
    case EditorKind::Qr:
      return std::make_unique<harness_detail::QrDriver>(anchor, pen);
    case EditorKind::AlphaEdit:
      return std::make_unique<harness_detail::AlphaEditDriver>(anchor, rank_tol);
    case EditorKind::Memit:
      return std::make_unique<harness_detail::MemitDriver>(anchor, ridge);
    case EditorKind::HardWrite:
      return std::make_unique<harness_detail::HardWriteDriver>(anchor);
  }
  throw UsageError("unknown editor kind");
}

struct RunConfig {
  EditorKind editor = EditorKind::Rls;
  std::filesystem::path stream_path;
  Penalties penalties;
  std::size_t metrics_every = 1;
  std::vector<std::size_t> early_probe;  // 1-based step indices
  std::filesystem::path out_dir;
  double ridge = 1.0;      // memit only
  double rank_tol = 1e-6;  // alphaedit only
  std::vector<std::size_t> ckpt_at;
  std::filesystem::path resume_from;  // empty for a fresh run
};

struct RunOutputs {
  Matrix w_final;
  std::size_t steps = 0;
  std::size_t resumed_from = 0;
  bool anchor_consistent = true;
  std::vector<MetricsRow> rows;
  std::vector<StepStats> trace;
  std::filesystem::path metrics_csv;
  std::filesystem::path trace_csv;
  std::filesystem::path final_checkpoint;
  std::filesystem::path run_meta;
};

namespace harness_detail {

inline std::string ckpt_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ckpt_%06zu.rlsc", t);
  return buf;
}

} // namespace harness_detail

/// Applies the configured editor over the whole stream, recording per-step
/// residual statistics, periodic metrics rows, and a final checkpoint.
/// Wall time is measured around the editor call only.
///
/// On resume the running bound columns restart from zero (the recorded
/// prefix lives in the original run's outputs); the state trajectory itself
/// is bit-identical to an uninterrupted run.
inline RunOutputs run_editor(const RunConfig& cfg) {
  if (cfg.metrics_every == 0) throw UsageError("metrics-every must be >= 1");
  auto [anchor, batches] = load_stream(cfg.stream_path);
  const std::size_t total = batches.size();
  for (std::size_t p : cfg.early_probe)
    if (p < 1 || p > total)
      throw UsageError("early-probe step " + std::to_string(p) +
                       " outside [1, " + std::to_string(total) + "]");

  std::filesystem::create_directories(cfg.out_dir);
  auto driver = make_driver(cfg.editor, anchor, cfg.penalties, cfg.ridge,
                            cfg.rank_tol);

  std::size_t start_t = 0;
  if (!cfg.resume_from.empty()) {
    const Checkpoint c = load_checkpoint(cfg.resume_from);
    if ((cfg.editor == EditorKind::Rls || cfg.editor == EditorKind::Qr) &&
        (c.penalties.lambda != cfg.penalties.lambda ||
         c.penalties.mu != cfg.penalties.mu))
      throw UsageError("checkpoint penalties differ from the requested run");
    if (c.t > total)
      throw UsageError("checkpoint is ahead of the stream end");
    driver->restore(c, std::span<const EditBatch>(batches).first(c.t));
    start_t = c.t;
  }

  RunOutputs out;
  out.steps = total;
  out.resumed_from = start_t;
  out.anchor_consistent = anchor_consistent(anchor);
  out.metrics_csv = cfg.out_dir / "metrics.csv";
  out.trace_csv = cfg.out_dir / "trace.csv";

  const auto flush_csvs = [&] {
    io::atomic_write(out.metrics_csv, [&](std::ostream& os) {
      write_metrics_csv(os, out.rows, cfg.early_probe.size());
    });
    io::atomic_write(out.trace_csv,
                     [&](std::ostream& os) { write_trace_csv(os, out.trace); });
  };

  const double mu = cfg.penalties.mu;
  const bool mu_pos = mu > 0.0;
  double k0_norm = 0.0;
  double running_basic = 0.0;
  double running_adaptive = 0.0;
  double running_denom = cfg.penalties.lambda * cfg.penalties.lambda;
  if (anchor.n0() > 0 && mu_pos) {
    k0_norm = singular_extremes(anchor.K0).first;
    running_denom += mu * mu * gram_floor_sq(anchor.K0);
  }

  try {
    for (std::size_t t = start_t + 1; t <= total; ++t) {
      const EditBatch& b = batches[t - 1];
      const Matrix w_prev = driver->weights();
      const StepStats stats = step_stats(b, w_prev);
      out.trace.push_back(stats);

      const auto tick = std::chrono::steady_clock::now();
      driver->step(b);
      const auto tock = std::chrono::steady_clock::now();
      const std::uint64_t wall_ns = std::max<std::int64_t>(
          1, std::chrono::duration_cast<std::chrono::nanoseconds>(tock - tick)
                 .count());

      if (mu_pos) {
        running_basic += stats.residual_fro / mu;
        running_denom += stats.k_floor_sq;
        running_adaptive +=
            k0_norm * stats.k_norm2 * stats.residual_fro / running_denom;
      }

      if (t % cfg.metrics_every == 0 || t == total) {
        const Matrix w_now = driver->weights();
        const ObjectiveTerms terms =
            objective_terms(w_now, b, anchor.W0, anchor);
        MetricsRow row;
        row.step = t;
        row.term1 = terms.edit_fit;
        row.term2 = terms.weight_drift;
        row.term3 = terms.anchor_drift;
        for (std::size_t p : cfg.early_probe) {
          const EditBatch& probe = batches[p - 1];
          const double r = (probe.K * w_now - probe.V).frobenius_norm();
          row.early.push_back(r * r);
        }
        row.bound_basic = running_basic;
        row.bound_adaptive = running_adaptive;
        row.wall_ns = wall_ns;
        out.rows.push_back(std::move(row));
      }

      if (std::find(cfg.ckpt_at.begin(), cfg.ckpt_at.end(), t) !=
          cfg.ckpt_at.end()) {
        Checkpoint c = driver->checkpoint();
        c.t = t;
        save_checkpoint(cfg.out_dir / harness_detail::ckpt_name(t), c);
      }
    }
  } catch (...) {
    flush_csvs();  // partial rows survive an editor failure
    throw;
  }

  out.w_final = driver->weights();
  flush_csvs();

  out.final_checkpoint = cfg.out_dir / "final.rlsc";
  Checkpoint final_c = driver->checkpoint();
  final_c.t = total;
  save_checkpoint(out.final_checkpoint, final_c);

  nlohmann::json meta;
  meta["format"] = "rlsedit-run-v1";
  meta["editor"] = editor_name(cfg.editor);
  meta["lambda"] = cfg.penalties.lambda;
  meta["mu"] = cfg.penalties.mu;
  meta["ridge"] = cfg.ridge;
  meta["rank_tol"] = cfg.rank_tol;
  meta["stream"] = cfg.stream_path.string();
  meta["steps"] = total;
  meta["resumed_from_step"] = start_t;
  meta["metrics_every"] = cfg.metrics_every;
  meta["early_probe"] = cfg.early_probe;
  meta["anchor_consistent"] = out.anchor_consistent;
  out.run_meta = cfg.out_dir / "run.json";
  io::atomic_write(out.run_meta,
                   [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
  return out;
}

struct AuditOutcome {
  std::vector<LabeledBound> rows;
  bool ok = true;
  std::filesystem::path csv;
};

inline constexpr double kDirectSlackTol = 1e-10;
inline constexpr double kRecursiveSlackTol = 1e-8;

/// Re-audits a finished rls/qr run: a direct pass recomputes residuals and
/// measured deviations from exact prefix minimizers (separating genuine bound
/// violations from recursion drift), and a recursive pass re-checks the
/// recorded trace against the checkpointed weights at a looser tolerance.
inline AuditOutcome audit_run(const std::filesystem::path& run_dir) {
  std::ifstream meta_in(run_dir / "run.json");
  if (!meta_in) throw IoError("cannot open " + (run_dir / "run.json").string());
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("bad run.json: ") + e.what());
  }
  if (meta.value("format", "") != "rlsedit-run-v1")
    throw SchemaMismatch("unknown run.json format");

  const std::string editor = meta.value("editor", "");
  if (editor != "rls" && editor != "qr")
    throw UsageError("audit applies to rls/qr runs, found '" + editor + "'");
  if (!meta.value("anchor_consistent", false))
    throw FlaggedAnchor("run was recorded with an inconsistent anchor");

  Penalties pen{meta.value("lambda", 0.0), meta.value("mu", 0.0)};
  std::filesystem::path stream_path(meta.value("stream", ""));
  if (!std::filesystem::exists(stream_path) &&
      std::filesystem::exists(run_dir / stream_path.filename()))
    stream_path = run_dir / stream_path.filename();
  auto [anchor, batches] = load_stream(stream_path);
  require_consistent_anchor(anchor);

  AuditOutcome out;
  out.csv = run_dir / "bounds.csv";
  if (batches.empty()) {
    io::atomic_write(out.csv,
                     [&](std::ostream& os) { write_bounds_csv(os, {}); });
    return out;
  }

  std::ifstream trace_in(run_dir / "trace.csv");
  if (!trace_in) throw MissingTrace("missing trace.csv in " + run_dir.string());
  const std::vector<StepStats> trace = read_trace_csv(trace_in);
  if (trace.size() != batches.size())
    throw MissingTrace("trace covers " + std::to_string(trace.size()) +
                       " of " + std::to_string(batches.size()) + " steps");

  const std::filesystem::path ckpt_path = run_dir / "final.rlsc";
  if (!std::filesystem::exists(ckpt_path))
    throw MissingTrace("missing final.rlsc in " + run_dir.string());
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  Matrix w_rec;
  if (ckpt.mode == CheckpointMode::Woodbury) {
    w_rec = ckpt.block_a;
  } else if (ckpt.mode == CheckpointMode::StreamingQr) {
    w_rec = qr_weights(qr_from_checkpoint(ckpt, anchor));
  } else {
    throw ModeMismatch("final checkpoint is not an rls/qr state");
  }

  // Direct pass: exact prefix minimizers via incremental normal equations.
  std::vector<StepStats> direct_stats;
  Matrix s = regularized_gram_base(anchor, pen);
  Matrix tm = anchor.W0 * (pen.lambda * pen.lambda);
  if (anchor.n0() > 0)
    tm += transpose_times(anchor.K0, anchor.V0) * (pen.mu * pen.mu);
  Matrix w_direct = spd_solve(s, tm);
  for (const EditBatch& b : batches) {
    direct_stats.push_back(step_stats(b, w_direct));
    s += gram(b.K);
    tm += transpose_times(b.K, b.V);
    w_direct = spd_solve(s, tm);
  }

  const std::size_t T = batches.size();
  auto push = [&](const std::string& pass, const BoundReport& r, double tol) {
    out.rows.push_back({pass, r});
    if (!bound_holds(r, tol)) out.ok = false;
  };

  if (pen.lambda > 0.0) {
    const double pb = param_bound_value(anchor, pen, batches);
    push("direct",
         make_report(T, (w_direct - anchor.W0).frobenius_norm(), pb,
                     BoundKind::ParamDev),
         kDirectSlackTol);
    push("recursive",
         make_report(T, (w_rec - anchor.W0).frobenius_norm(), pb,
                     BoundKind::ParamDev),
         kRecursiveSlackTol);
  }

  if (pen.mu > 0.0) {
    const auto [basic_d, adaptive_d] =
        bound_map_deviation(anchor, pen, direct_stats, w_direct);
    push("direct", basic_d, kDirectSlackTol);
    push("direct", adaptive_d, kDirectSlackTol);
    const auto [basic_r, adaptive_r] =
        bound_map_deviation(anchor, pen, trace, w_rec);
    push("recursive", basic_r, kRecursiveSlackTol);
    push("recursive", adaptive_r, kRecursiveSlackTol);
  }

  const double root_phi = std::sqrt(phi_at_w0(anchor, batches));
  const double d_direct =
      anchor.n0() ? (anchor.K0 * (w_direct - anchor.W0)).frobenius_norm() : 0.0;
  const double d_rec =
      anchor.n0() ? (anchor.K0 * (w_rec - anchor.W0)).frobenius_norm() : 0.0;
  if (pen.mu > 0.0) {
    push("direct",
         make_report(T, d_direct, root_phi / pen.mu, BoundKind::MuLimit),
         kDirectSlackTol);
    push("recursive",
         make_report(T, d_rec, root_phi / pen.mu, BoundKind::MuLimit),
         kRecursiveSlackTol);
  }
  if (pen.lambda > 0.0) {
    push("direct",
         make_report(T, (w_direct - anchor.W0).frobenius_norm(),
                     root_phi / pen.lambda, BoundKind::LambdaLimit),
         kDirectSlackTol);
    push("recursive",
         make_report(T, (w_rec - anchor.W0).frobenius_norm(),
                     root_phi / pen.lambda, BoundKind::LambdaLimit),
         kRecursiveSlackTol);
  }

  io::atomic_write(out.csv,
                   [&](std::ostream& os) { write_bounds_csv(os, out.rows); });
  return out;
}

struct BenchConfig {
  std::vector<EditorKind> editors{EditorKind::Rls, EditorKind::AlphaEdit};
  std::size_t dk = 256;
  std::size_t dv = 64;
  std::size_t n0 = 64;
  std::size_t u = 8;
  std::size_t steps = 2000;
  std::uint64_t seed = 0;
  Penalties penalties{1.0, 1.0};
  double ridge = 1.0;
  double rank_tol = 1e-6;
  std::size_t repeats = 1;
};

struct BenchRow {
  EditorKind editor;
  std::string window;  // "early" or "late"
  std::size_t start = 0;
  std::size_t end = 0;
  std::uint64_t median_ns = 0;
  std::size_t repeat = 0;
};

/// Per-edit wall times for one editor over one stream; timing wraps the
/// editor call only.
inline std::vector<std::uint64_t> bench_per_edit_ns(
    EditorKind kind, const Anchor& anchor, std::span<const EditBatch> batches,
    const Penalties& pen, double ridge, double rank_tol) {
  auto driver = make_driver(kind, anchor, pen, ridge, rank_tol);
  std::vector<std::uint64_t> ns;
  ns.reserve(batches.size());
  for (const EditBatch& b : batches) {
    const auto tick = std::chrono::steady_clock::now();
    driver->step(b);
    const auto tock = std::chrono::steady_clock::now();
    ns.push_back(std::max<std::int64_t>(
        1, std::chrono::duration_cast<std::chrono::nanoseconds>(tock - tick)
               .count()));
  }
  return ns;
}

inline std::uint64_t window_median(std::span<const std::uint64_t> ns,
                                   std::size_t start, std::size_t end) {
  std::vector<std::uint64_t> w(ns.begin() + static_cast<std::ptrdiff_t>(start - 1),
                               ns.begin() + static_cast<std::ptrdiff_t>(end));
  std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2),
                   w.end());
  return w[w.size() / 2];
}

/// Median per-edit time in the windows [100, 200] and [steps-100, steps].
/// AlphaEdit's accumulated key set grows with t, so its late window reflects
/// the growing Gram-formation cost; the RLS editor's cost is flat.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  if (cfg.steps <= 300)
    throw UsageError("bench needs steps > 300 for disjoint windows");

  const Anchor anchor = gen_anchor(cfg.dk, cfg.dv, cfg.n0, cfg.seed);
  StreamSpec spec;
  spec.dk = cfg.dk;
  spec.dv = cfg.dv;
  spec.u = cfg.u;
  spec.steps = cfg.steps;
  spec.noise_scale = 0.1;
  spec.seed = cfg.seed + 2;
  spec.ground_truth = gen_anchor(cfg.dk, cfg.dv, 0, cfg.seed + 1).W0;
  const auto batches = gen_stream(spec);

  std::vector<BenchRow> rows;
  for (std::size_t rep = 0; rep < cfg.repeats; ++rep) {
    for (EditorKind kind : cfg.editors) {
      const auto ns = bench_per_edit_ns(kind, anchor, batches, cfg.penalties,
                                        cfg.ridge, cfg.rank_tol);
      rows.push_back({kind, "early", 100, 200, window_median(ns, 100, 200), rep});
      rows.push_back({kind, "late", cfg.steps - 100, cfg.steps,
                      window_median(ns, cfg.steps - 100, cfg.steps), rep});
    }
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchVersionLine << '\n'
     << "editor,window,start,end,median_wall_ns,repeat\n";
  for (const BenchRow& r : rows)
    os << editor_name(r.editor) << ',' << r.window << ',' << r.start << ','
       << r.end << ',' << r.median_ns << ',' << r.repeat << '\n';
}

/// One SVG per metric family present in the CSV. An empty CSV produces no
/// files and a warning.
inline std::vector<std::filesystem::path> plot_metrics(
    const std::filesystem::path& csv, const std::filesystem::path& out_dir) {
  const MetricsFile mf = load_metrics_csv(csv);
  std::vector<std::filesystem::path> files;
  if (mf.rows.empty()) {
    std::cerr << "warning: " << csv.string() << " has no data rows; no plots written\n";
    return files;
  }
  std::filesystem::create_directories(out_dir);

  std::vector<double> xs;
  for (const MetricsRow& r : mf.rows) xs.push_back(static_cast<double>(r.step));

  auto column = [&](auto getter) {
    std::vector<double> ys;
    for (const MetricsRow& r : mf.rows) ys.push_back(getter(r));
    return ys;
  };

  {
    std::vector<Series> s;
    s.push_back({"term1 edit fit", xs, column([](auto& r) { return r.term1; })});
    s.push_back({"term2 weight drift", xs, column([](auto& r) { return r.term2; })});
    s.push_back({"term3 anchor drift", xs, column([](auto& r) { return r.term3; })});
    const auto path = out_dir / "terms.svg";
    write_svg(path, render_line_chart("objective terms", "step",
                                      "squared Frobenius norm", s));
    files.push_back(path);
  }
  if (mf.early_count > 0) {
    std::vector<Series> s;
    for (std::size_t i = 0; i < mf.early_count; ++i)
      s.push_back({"early_" + std::to_string(i), xs,
                   column([i](auto& r) { return r.early[i]; })});
    const auto path = out_dir / "early.svg";
    write_svg(path, render_line_chart("early-edit probe residuals", "step",
                                      "squared residual", s));
    files.push_back(path);
  }
  {
    std::vector<Series> s;
    s.push_back({"wall_ns", xs, column([](auto& r) {
                   return static_cast<double>(r.wall_ns);
                 })});
    const auto path = out_dir / "timing.svg";
    write_svg(path, render_line_chart("per-edit wall time", "step",
                                      "nanoseconds", s));
    files.push_back(path);
  }
  return files;
}

} // namespace rlsedit
