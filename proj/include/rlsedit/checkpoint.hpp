#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rlsedit/io.hpp"
#include "rlsedit/qr.hpp"
#include "rlsedit/rls.hpp"

namespace rlsedit {

// "RLSC" v1 layout: magic, u32 version, u8 mode, u64 t, f64 lambda, f64 mu,
// mode-dependent RLSM blocks, then a trailing u64 FNV-1a checksum of all
// preceding bytes.
//   mode 0 (woodbury):      W, C, W0
//   mode 1 (streaming QR):  R (dense, zero lower triangle), Bbar, W0
//   mode 2 (weights-only):  W, W0            -- baseline editors
inline constexpr std::string_view kCheckpointMagic = "RLSC";
inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class CheckpointMode : std::uint8_t {
  Woodbury = 0,
  StreamingQr = 1,
  WeightsOnly = 2,
};

struct Checkpoint {
  CheckpointMode mode = CheckpointMode::Woodbury;
  std::size_t t = 0;
  Penalties penalties;
  Matrix block_a;  // W or R
  Matrix block_b;  // C or Bbar; empty in weights-only mode
  Matrix w0;
};

namespace detail {

inline void write_checkpoint_payload(std::ostream& os, const Checkpoint& c) {
  io::write_magic(os, kCheckpointMagic);
  io::write_u32(os, kCheckpointVersion);
  io::write_u8(os, static_cast<std::uint8_t>(c.mode));
  io::write_u64(os, c.t);
  io::write_f64(os, c.penalties.lambda);
  io::write_f64(os, c.penalties.mu);
  io::write_matrix(os, c.block_a);
  if (c.mode != CheckpointMode::WeightsOnly) io::write_matrix(os, c.block_b);
  io::write_matrix(os, c.w0);
}

} // namespace detail

inline void save_checkpoint(const std::filesystem::path& path,
                            const Checkpoint& c) {
  std::ostringstream payload(std::ios::binary);
  detail::write_checkpoint_payload(payload, c);
  const std::string bytes = payload.str();
  const std::uint64_t sum = io::fnv1a(bytes);
  io::atomic_write(path, [&](std::ostream& os) {
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    io::write_u64(os, sum);
  });
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::ostringstream buf(std::ios::binary);
  buf << is.rdbuf();
  const std::string bytes = buf.str();
  if (bytes.size() < 8 + 4) throw TruncatedFile("checkpoint too short");

  // Structural parse first so truncation is reported as such; the checksum
  // then catches in-place corruption of a structurally valid file.
  std::istringstream body(bytes.substr(0, bytes.size() - 8), std::ios::binary);
  io::expect_magic(body, kCheckpointMagic);
  const std::uint32_t ver = io::read_u32(body);
  if (ver != kCheckpointVersion)
    throw VersionMismatch("RLSC version " + std::to_string(ver));
  Checkpoint c;
  const std::uint8_t mode = io::read_u8(body);
  if (mode > 2) throw ModeMismatch("unknown checkpoint mode " + std::to_string(mode));
  c.mode = static_cast<CheckpointMode>(mode);
  c.t = static_cast<std::size_t>(io::read_u64(body));
  c.penalties.lambda = io::read_f64(body);
  c.penalties.mu = io::read_f64(body);
  c.block_a = io::read_matrix(body);
  if (c.mode != CheckpointMode::WeightsOnly) c.block_b = io::read_matrix(body);
  c.w0 = io::read_matrix(body);

  std::istringstream tail(bytes.substr(bytes.size() - 8), std::ios::binary);
  if (io::read_u64(tail) != io::fnv1a({bytes.data(), bytes.size() - 8}))
    throw ChecksumMismatch("checkpoint checksum mismatch");
  return c;
}

inline Checkpoint to_checkpoint(const RlsState& st) {
  return {CheckpointMode::Woodbury, st.t, st.penalties, st.W, st.C, st.W0};
}

inline Checkpoint to_checkpoint(const QrState& st) {
  return {CheckpointMode::StreamingQr, st.t, st.penalties, st.R.to_matrix(),
          st.Bbar, st.W0};
}

inline RlsState rls_from_checkpoint(const Checkpoint& c, const Anchor& anchor) {
  if (c.mode != CheckpointMode::Woodbury)
    throw ModeMismatch("checkpoint is not a woodbury state");
  RlsState st;
  st.W = c.block_a;
  st.C = c.block_b;
  st.t = c.t;
  st.penalties = c.penalties;
  st.W0 = c.w0;
  st.anchor_dims = {anchor.n0(), anchor.dk(), anchor.dv()};
  st.anchor_consistent = anchor_consistent(anchor);
  return st;
}

inline QrState qr_from_checkpoint(const Checkpoint& c, const Anchor& anchor) {
  if (c.mode != CheckpointMode::StreamingQr)
    throw ModeMismatch("checkpoint is not a streaming-QR state");
  QrState st;
  st.R = UpperTriangular::from_dense(c.block_a);
  st.Bbar = c.block_b;
  st.t = c.t;
  st.penalties = c.penalties;
  st.W0 = c.w0;
  st.anchor_dims = {anchor.n0(), anchor.dk(), anchor.dv()};
  st.anchor_consistent = anchor_consistent(anchor);
  return st;
}

} // namespace rlsedit
