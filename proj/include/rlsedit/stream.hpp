#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <utility>
#include <vector>

#include "rlsedit/io.hpp"
#include "rlsedit/matrix.hpp"
#include "rlsedit/rng.hpp"

namespace rlsedit {

inline constexpr double kAnchorTol = 1e-10;

/// Preservation pair (K0, V0) plus the initial weights W0. A consistent
/// anchor satisfies K0 W0 = V0; generators produce it exactly.
struct Anchor {
  Matrix K0;  // n0 x dk
  Matrix V0;  // n0 x dv
  Matrix W0;  // dk x dv

  std::size_t n0() const { return K0.rows(); }
  std::size_t dk() const { return W0.rows(); }
  std::size_t dv() const { return W0.cols(); }
};

inline void validate_anchor_shapes(const Anchor& a) {
  if (a.K0.rows() != a.V0.rows() || a.K0.cols() != a.W0.rows() ||
      a.V0.cols() != a.W0.cols())
    throw ShapeMismatch("anchor shapes are inconsistent");
}

/// ||K0 W0 - V0||_F <= kAnchorTol * (1 + ||V0||_F).
inline bool anchor_consistent(const Anchor& a) {
  if (a.n0() == 0) return true;
  const Matrix r = a.K0 * a.W0 - a.V0;
  return r.frobenius_norm() <= kAnchorTol * (1.0 + a.V0.frobenius_norm());
}

/// One time step's key-value constraints.
struct EditBatch {
  Matrix K;  // u x dk
  Matrix V;  // u x dv
  std::size_t step_index = 0;

  std::size_t u() const { return K.rows(); }
};

/// Descriptor for a synthetic stream V_i = K_i W* + E_i with i.i.d. normal
/// keys and noise.
struct StreamSpec {
  std::size_t dk = 0;
  std::size_t dv = 0;
  std::size_t u = 1;                   // rows per step
  std::vector<std::size_t> u_schedule; // optional per-step override
  std::size_t steps = 0;
  double noise_scale = 0.0;  // stddev of E entries
  double key_scale = 1.0;    // stddev of K entries
  std::uint64_t seed = 0;
  Matrix ground_truth;  // W*, dk x dv

  std::size_t u_at(std::size_t step) const {  // step is 1-based
    return u_schedule.empty() ? u : u_schedule[step - 1];
  }
};

inline void validate_spec(const StreamSpec& s) {
  if (s.dk == 0 || s.dv == 0) throw ShapeMismatch("stream spec: zero dimension");
  if (s.steps == 0) throw UsageError("stream spec: steps must be >= 1");
  if (s.noise_scale < 0.0) throw UsageError("stream spec: negative noise scale");
  if (s.key_scale <= 0.0) throw UsageError("stream spec: key scale must be positive");
  if (s.ground_truth.rows() != s.dk || s.ground_truth.cols() != s.dv)
    throw ShapeMismatch("stream spec: ground truth shape");
  if (!s.u_schedule.empty() && s.u_schedule.size() != s.steps)
    throw ShapeMismatch("stream spec: u schedule length");
  for (std::size_t t = 1; t <= s.steps; ++t)
    if (s.u_at(t) == 0) throw UsageError("stream spec: u must be >= 1");
}

/// Seeded anchor with the anchor condition holding by construction:
/// K0 and W0 are standard normal draws (K0 rows first, then W0) and
/// V0 is computed as the exact product K0 W0.
inline Anchor gen_anchor(std::size_t dk, std::size_t dv, std::size_t n0,
                         std::uint64_t seed) {
  if (dk == 0 || dv == 0) throw ShapeMismatch("gen_anchor: zero dimension");
  NormalRng rng(seed);
  Anchor a;
  a.K0 = Matrix(n0, dk);
  rng.fill_normal(a.K0);
  a.W0 = Matrix(dk, dv);
  rng.fill_normal(a.W0);
  a.V0 = a.K0 * a.W0;
  return a;
}

/// Draw order per batch: K rows first, then E rows.
inline std::vector<EditBatch> gen_stream(const StreamSpec& spec) {
  validate_spec(spec);
  NormalRng rng(spec.seed);
  std::vector<EditBatch> batches;
  batches.reserve(spec.steps);
  for (std::size_t t = 1; t <= spec.steps; ++t) {
    const std::size_t u = spec.u_at(t);
    EditBatch b;
    b.step_index = t;
    b.K = Matrix(u, spec.dk);
    rng.fill_normal(b.K, spec.key_scale);
    Matrix noise(u, spec.dv);
    rng.fill_normal(noise, spec.noise_scale);
    b.V = b.K * spec.ground_truth + noise;
    batches.push_back(std::move(b));
  }
  return batches;
}

/// Stress stream: the first ceil(conflict_fraction * u) rows of each batch
/// reuse anchor key rows with targets V0 + noise; the rest follow the plain
/// generator. Draw order per batch: anchor row indices, fresh K rows, then
/// E rows for the whole batch. With conflict_fraction = 0 the output is
/// bitwise identical to gen_stream.
inline std::vector<EditBatch> gen_conflicting_stream(const Anchor& anchor,
                                                     const StreamSpec& spec,
                                                     double conflict_fraction) {
  validate_spec(spec);
  if (conflict_fraction < 0.0 || conflict_fraction > 1.0)
    throw UsageError("conflict fraction outside [0, 1]");
  if (anchor.n0() == 0 && conflict_fraction > 0.0)
    throw EmptyAnchor("conflicting stream requires a nonempty anchor");
  if (conflict_fraction > 0.0 &&
      (anchor.dk() != spec.dk || anchor.dv() != spec.dv))
    throw ShapeMismatch("anchor dimensions do not match the stream spec");

  NormalRng rng(spec.seed);
  std::vector<EditBatch> batches;
  batches.reserve(spec.steps);
  for (std::size_t t = 1; t <= spec.steps; ++t) {
    const std::size_t u = spec.u_at(t);
    const std::size_t c = std::min<std::size_t>(
        u, static_cast<std::size_t>(
               std::ceil(conflict_fraction * static_cast<double>(u))));
    EditBatch b;
    b.step_index = t;
    b.K = Matrix(u, spec.dk);

    // Distinct anchor rows per batch while the pool lasts, so batches stay
    // full row rank for the hard-constraint editors.
    std::vector<std::size_t> picks;
    picks.reserve(c);
    for (std::size_t r = 0; r < c; ++r) {
      std::size_t idx = static_cast<std::size_t>(rng.below(anchor.n0()));
      if (picks.size() < anchor.n0())
        while (std::find(picks.begin(), picks.end(), idx) != picks.end())
          idx = static_cast<std::size_t>(rng.below(anchor.n0()));
      picks.push_back(idx);
    }
    for (std::size_t r = 0; r < c; ++r)
      std::copy(anchor.K0.row(picks[r]).begin(), anchor.K0.row(picks[r]).end(),
                b.K.row(r).begin());
    for (std::size_t r = c; r < u; ++r)
      for (double& v : b.K.row(r)) v = rng.normal(spec.key_scale);

    Matrix noise(u, spec.dv);
    rng.fill_normal(noise, spec.noise_scale);

    const Matrix pred = b.K * spec.ground_truth;
    b.V = Matrix(u, spec.dv);
    for (std::size_t r = 0; r < u; ++r) {
      const auto base = (r < c) ? anchor.V0.row(picks[r]) : pred.row(r);
      auto out = b.V.row(r);
      const auto e = noise.row(r);
      for (std::size_t j = 0; j < spec.dv; ++j) out[j] = base[j] + e[j];
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

inline constexpr std::string_view kStreamMagic = "RLSS";
inline constexpr std::uint32_t kStreamVersion = 1;

inline void write_stream(std::ostream& os, const Anchor& anchor,
                         std::span<const EditBatch> batches) {
  io::write_magic(os, kStreamMagic);
  io::write_u32(os, kStreamVersion);
  io::write_u64(os, batches.size());
  io::write_matrix(os, anchor.K0);
  io::write_matrix(os, anchor.V0);
  io::write_matrix(os, anchor.W0);
  for (const EditBatch& b : batches) {
    io::write_u64(os, b.step_index);
    io::write_matrix(os, b.K);
    io::write_matrix(os, b.V);
  }
}

inline std::pair<Anchor, std::vector<EditBatch>> read_stream(std::istream& is) {
  io::expect_magic(is, kStreamMagic);
  const std::uint32_t ver = io::read_u32(is);
  if (ver != kStreamVersion)
    throw VersionMismatch("RLSS version " + std::to_string(ver));
  const std::uint64_t steps = io::read_u64(is);
  Anchor anchor;
  anchor.K0 = io::read_matrix(is);
  anchor.V0 = io::read_matrix(is);
  anchor.W0 = io::read_matrix(is);
  validate_anchor_shapes(anchor);
  std::vector<EditBatch> batches;
  for (std::uint64_t t = 0; t < steps; ++t) {
    EditBatch b;
    b.step_index = static_cast<std::size_t>(io::read_u64(is));
    b.K = io::read_matrix(is);
    b.V = io::read_matrix(is);
    if (b.K.rows() != b.V.rows()) throw ShapeMismatch("batch row mismatch");
    batches.push_back(std::move(b));
  }
  return {std::move(anchor), std::move(batches)};
}

inline void save_stream(const std::filesystem::path& path, const Anchor& anchor,
                        std::span<const EditBatch> batches) {
  io::atomic_write(path,
                   [&](std::ostream& os) { write_stream(os, anchor, batches); });
}

inline std::pair<Anchor, std::vector<EditBatch>> load_stream(
    const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_stream(is);
}

} // namespace rlsedit
