// rlsedit command-line harness: generate synthetic edit streams, run the
// editors over them, audit the deviation bounds, benchmark per-edit cost,
// inspect checkpoints, and plot metric traces.
//
// Exit codes: 0 success, 2 usage, 3 numerical failure, 4 I/O.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rlsedit/checkpoint.hpp"
#include "rlsedit/harness.hpp"
#include "rlsedit/stream.hpp"

namespace fs = std::filesystem;
using namespace rlsedit;

namespace {

struct GenArgs {
  std::size_t dk = 16, dv = 4, n0 = 16, u = 4, steps = 1000;
  double noise = 0.1, key_scale = 1.0, conflict = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

// Sub-seeds: anchor uses --seed, the ground-truth map seed+1, the stream
// seed+2. All randomness flows from the one flag.
void cmd_gen(const GenArgs& a) {
  const Anchor anchor = gen_anchor(a.dk, a.dv, a.n0, a.seed);
  StreamSpec spec;
  spec.dk = a.dk;
  spec.dv = a.dv;
  spec.u = a.u;
  spec.steps = a.steps;
  spec.noise_scale = a.noise;
  spec.key_scale = a.key_scale;
  spec.seed = a.seed + 2;
  spec.ground_truth = gen_anchor(a.dk, a.dv, 0, a.seed + 1).W0;
  const auto batches = (a.conflict > 0.0)
                           ? gen_conflicting_stream(anchor, spec, a.conflict)
                           : gen_stream(spec);
  save_stream(a.out, anchor, batches);
  std::cout << "wrote " << a.out << " (" << batches.size() << " steps, dk="
            << a.dk << ", dv=" << a.dv << ", u=" << a.u << ")\n";
}

struct RunArgs {
  std::string stream;
  std::string editor = "rls";
  double lambda = 3.0, mu = 20000.0, ridge = 1.0, rank_tol = 1e-6;
  std::size_t metrics_every = 1;
  std::vector<std::size_t> early_probe;
  std::vector<std::size_t> ckpt_at;
  std::string out;
  std::string resume;
};

void cmd_run(const RunArgs& a) {
  RunConfig cfg;
  cfg.editor = parse_editor(a.editor);
  cfg.stream_path = a.stream;
  cfg.penalties = {a.lambda, a.mu};
  cfg.metrics_every = a.metrics_every;
  cfg.early_probe = a.early_probe;
  cfg.ckpt_at = a.ckpt_at;
  cfg.out_dir = a.out;
  cfg.ridge = a.ridge;
  cfg.rank_tol = a.rank_tol;
  if (!a.resume.empty()) cfg.resume_from = a.resume;

  const RunOutputs out = run_editor(cfg);
  if (!out.anchor_consistent)
    std::cerr << "warning: anchor condition K0 W0 = V0 violated; "
                 "bound audits will refuse this run\n";
  std::cout << "ran " << a.editor << " over " << out.steps << " steps";
  if (out.resumed_from > 0) std::cout << " (resumed at " << out.resumed_from << ")";
  std::cout << "\nmetrics:    " << out.metrics_csv.string()
            << "\ntrace:      " << out.trace_csv.string()
            << "\ncheckpoint: " << out.final_checkpoint.string() << "\n";
}

void cmd_audit(const std::string& run_dir) {
  const AuditOutcome out = audit_run(run_dir);
  for (const LabeledBound& r : out.rows)
    std::cout << r.pass << ' ' << bound_kind_name(r.report.kind)
              << ": measured=" << r.report.measured
              << " bound=" << r.report.bound << " slack=" << r.report.slack
              << '\n';
  std::cout << (out.ok ? "all bounds hold" : "BOUND VIOLATION") << " ("
            << out.rows.size() << " reports) -> " << out.csv.string() << "\n";
  if (!out.ok) throw NumericError("bound audit failed");
}

struct BenchArgs {
  std::string editors = "rls,alphaedit";
  std::size_t dk = 256, dv = 64, n0 = 64, u = 8, steps = 2000, repeats = 1;
  std::uint64_t seed = 0;
  double lambda = 1.0, mu = 1.0, ridge = 1.0;
  std::string out;
};

void cmd_bench(const BenchArgs& a) {
  BenchConfig cfg;
  cfg.editors.clear();
  std::string cur;
  for (char c : a.editors + ",") {
    if (c == ',') {
      if (!cur.empty()) cfg.editors.push_back(parse_editor(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (cfg.editors.empty()) throw UsageError("bench: no editors given");
  cfg.dk = a.dk;
  cfg.dv = a.dv;
  cfg.n0 = a.n0;
  cfg.u = a.u;
  cfg.steps = a.steps;
  cfg.seed = a.seed;
  cfg.penalties = {a.lambda, a.mu};
  cfg.ridge = a.ridge;
  cfg.repeats = a.repeats;

  const auto rows = run_bench(cfg);
  for (const BenchRow& r : rows)
    std::cout << editor_name(r.editor) << ' ' << r.window << " [" << r.start
              << "," << r.end << "] median " << r.median_ns << " ns\n";
  if (!a.out.empty()) {
    io::atomic_write(a.out, [&](std::ostream& os) { write_bench_csv(os, rows); });
    std::cout << "wrote " << a.out << "\n";
  }
}

void cmd_ckpt_inspect(const std::string& path) {
  const Checkpoint c = load_checkpoint(path);
  const char* mode = c.mode == CheckpointMode::Woodbury      ? "woodbury"
                     : c.mode == CheckpointMode::StreamingQr ? "qr"
                                                             : "weights-only";
  std::cout << "mode:   " << mode << "\nt:      " << c.t
            << "\nlambda: " << c.penalties.lambda << "\nmu:     " << c.penalties.mu
            << "\nblocks: " << c.block_a.rows() << "x" << c.block_a.cols();
  if (c.mode != CheckpointMode::WeightsOnly)
    std::cout << ", " << c.block_b.rows() << "x" << c.block_b.cols();
  std::cout << ", " << c.w0.rows() << "x" << c.w0.cols() << "\n";
}

void cmd_ckpt_verify(const std::string& path) {
  load_checkpoint(path);  // throws on any corruption
  std::cout << path << ": ok\n";
}

void cmd_plot(const std::string& metrics, const std::string& out_dir) {
  const auto files = plot_metrics(metrics, out_dir);
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"RLSEdit: recursive least-squares sequential model editor"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* sub_gen = app.add_subcommand("gen", "generate a synthetic edit stream");
  sub_gen->add_option("--dk", gen.dk, "key dimension");
  sub_gen->add_option("--dv", gen.dv, "value dimension");
  sub_gen->add_option("--n0", gen.n0, "anchor rows");
  sub_gen->add_option("--u", gen.u, "rows per edit");
  sub_gen->add_option("--steps", gen.steps, "number of edits");
  sub_gen->add_option("--noise", gen.noise, "noise stddev");
  sub_gen->add_option("--key-scale", gen.key_scale, "key stddev");
  sub_gen->add_option("--conflict", gen.conflict,
                      "fraction of rows reusing anchor keys");
  sub_gen->add_option("--seed", gen.seed, "master seed");
  sub_gen->add_option("--out", gen.out, "output .rlss path")->required();

  RunArgs run;
  auto* sub_run = app.add_subcommand("run", "run an editor over a stream");
  sub_run->add_option("--stream", run.stream, "input .rlss path")->required();
  sub_run->add_option("--editor", run.editor,
                      "rls | qr | alphaedit | memit | hardwrite");
  sub_run->add_option("--lambda", run.lambda, "weight-deviation penalty");
  sub_run->add_option("--mu", run.mu, "anchor-map penalty");
  sub_run->add_option("--ridge", run.ridge, "memit ridge");
  sub_run->add_option("--rank-tol", run.rank_tol, "alphaedit projector rank tolerance");
  sub_run->add_option("--metrics-every", run.metrics_every, "metrics row cadence");
  sub_run->add_option("--early-probe", run.early_probe,
                      "step indices re-evaluated at each checkpoint")
      ->delimiter(',');
  sub_run->add_option("--ckpt-at", run.ckpt_at, "steps at which to checkpoint")
      ->delimiter(',');
  sub_run->add_option("--resume", run.resume, "checkpoint to resume from");
  sub_run->add_option("--out", run.out, "output directory")->required();

  std::string audit_dir;
  auto* sub_audit = app.add_subcommand("audit", "audit deviation bounds of a run");
  sub_audit->add_option("--run", audit_dir, "run directory")->required();

  BenchArgs bench;
  auto* sub_bench = app.add_subcommand("bench", "per-edit cost benchmark");
  sub_bench->add_option("--editors", bench.editors, "comma list of editors");
  sub_bench->add_option("--dk", bench.dk, "key dimension");
  sub_bench->add_option("--dv", bench.dv, "value dimension");
  sub_bench->add_option("--n0", bench.n0, "anchor rows");
  sub_bench->add_option("--u", bench.u, "rows per edit");
  sub_bench->add_option("--steps", bench.steps, "number of edits");
  sub_bench->add_option("--repeats", bench.repeats, "benchmark repetitions");
  sub_bench->add_option("--seed", bench.seed, "master seed");
  sub_bench->add_option("--lambda", bench.lambda, "weight-deviation penalty");
  sub_bench->add_option("--mu", bench.mu, "anchor-map penalty");
  sub_bench->add_option("--ridge", bench.ridge, "memit ridge");
  sub_bench->add_option("--out", bench.out, "timing CSV path");

  auto* sub_ckpt = app.add_subcommand("ckpt", "checkpoint utilities");
  sub_ckpt->require_subcommand(1);
  std::string ckpt_path;
  auto* ckpt_inspect = sub_ckpt->add_subcommand("inspect", "print header fields");
  ckpt_inspect->add_option("file", ckpt_path, "checkpoint path")->required();
  auto* ckpt_verify = sub_ckpt->add_subcommand("verify", "check checksum and layout");
  ckpt_verify->add_option("file", ckpt_path, "checkpoint path")->required();

  std::string plot_metrics_path, plot_out = ".";
  auto* sub_plot = app.add_subcommand("plot", "render SVG plots from a metrics CSV");
  sub_plot->add_option("--metrics", plot_metrics_path, "metrics.csv path")->required();
  sub_plot->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
    if (*sub_gen) cmd_gen(gen);
    if (*sub_run) cmd_run(run);
    if (*sub_audit) cmd_audit(audit_dir);
    if (*sub_bench) cmd_bench(bench);
    if (*sub_ckpt) {
      if (*ckpt_inspect) cmd_ckpt_inspect(ckpt_path);
      if (*ckpt_verify) cmd_ckpt_verify(ckpt_path);
    }
    if (*sub_plot) cmd_plot(plot_metrics_path, plot_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
