#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "rlsedit/matrix.hpp"

namespace rlsedit::io {

// All on-disk integers and doubles are little-endian regardless of host.

inline void write_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(b, 8);
}

inline void write_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline void write_f64(std::ostream& os, double d) {
  write_u64(os, std::bit_cast<std::uint64_t>(d));
}

inline void read_exact(std::istream& is, char* buf, std::size_t n) {
  is.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw TruncatedFile("unexpected end of file");
}

inline std::uint32_t read_u32(std::istream& is) {
  char b[4];
  read_exact(is, b, 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

inline std::uint64_t read_u64(std::istream& is) {
  char b[8];
  read_exact(is, b, 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

inline std::uint8_t read_u8(std::istream& is) {
  char b;
  read_exact(is, &b, 1);
  return static_cast<std::uint8_t>(b);
}

inline double read_f64(std::istream& is) {
  return std::bit_cast<double>(read_u64(is));
}

inline void write_magic(std::ostream& os, std::string_view magic) {
  os.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline void expect_magic(std::istream& is, std::string_view magic) {
  char b[4];
  read_exact(is, b, 4);
  if (std::string_view(b, 4) != magic)
    throw BadMagic("expected magic '" + std::string(magic) + "', found '" +
                   std::string(b, 4) + "'");
}

inline constexpr std::string_view kMatrixMagic = "RLSM";
inline constexpr std::uint32_t kMatrixVersion = 1;

// Upper bound on rows/cols; guards size computations against corrupt headers.
inline constexpr std::uint64_t kMaxDim = 1u << 24;

inline void write_matrix(std::ostream& os, const Matrix& m) {
  write_magic(os, kMatrixMagic);
  write_u32(os, kMatrixVersion);
  write_u64(os, m.rows());
  write_u64(os, m.cols());
  for (double v : m.data()) write_f64(os, v);
}

inline Matrix read_matrix(std::istream& is) {
  expect_magic(is, kMatrixMagic);
  const std::uint32_t ver = read_u32(is);
  if (ver != kMatrixVersion)
    throw VersionMismatch("RLSM version " + std::to_string(ver));
  const std::uint64_t rows = read_u64(is);
  const std::uint64_t cols = read_u64(is);
  if (rows > kMaxDim || cols > kMaxDim)
    throw TruncatedFile("implausible RLSM dimensions");
  std::vector<double> data;
  for (std::uint64_t k = 0; k < rows * cols; ++k) data.push_back(read_f64(is));
  return Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                std::move(data));
}

/// Writes via a temp file in the same directory, then renames into place.
template <typename WriteFn>
void atomic_write(const std::filesystem::path& path, WriteFn&& fn) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    fn(os);
    os.flush();
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  atomic_write(path, [&](std::ostream& os) { write_matrix(os, m); });
}

inline Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_matrix(is);
}

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

} // namespace rlsedit::io
