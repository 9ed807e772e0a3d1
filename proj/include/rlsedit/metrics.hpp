#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rlsedit/errors.hpp"
#include "rlsedit/theory.hpp"

namespace rlsedit {

/// One metrics checkpoint of a run: the three objective terms, the probe
/// residuals (squared), the running map-deviation bound values, and the
/// per-edit wall time of the step that produced the row.
struct MetricsRow {
  std::size_t step = 0;
  double term1 = 0.0;
  double term2 = 0.0;
  double term3 = 0.0;
  std::vector<double> early;  // one squared residual per probe
  double bound_basic = 0.0;
  double bound_adaptive = 0.0;
  std::uint64_t wall_ns = 1;
};

inline constexpr std::string_view kMetricsVersionLine = "# rlsedit-metrics-v1";
inline constexpr std::string_view kTraceVersionLine = "# rlsedit-trace-v1";
inline constexpr std::string_view kBoundsVersionLine = "# rlsedit-bounds-v1";
inline constexpr std::string_view kBenchVersionLine = "# rlsedit-bench-v1";

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw SchemaMismatch("bad numeric field '" + s + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& s) {
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw SchemaMismatch("bad integer field '" + s + "'");
  }
}

inline void expect_version_line(std::istream& is, std::string_view want) {
  std::string line;
  if (!std::getline(is, line))
    throw SchemaMismatch("missing version line");
  if (line != want)
    throw SchemaMismatch("unknown file version '" + line + "'");
}

} // namespace detail

inline std::string metrics_header(std::size_t early_count) {
  std::string h = "step,term1,term2,term3";
  for (std::size_t i = 0; i < early_count; ++i)
    h += ",early_" + std::to_string(i);
  h += ",bound_basic,bound_adaptive,wall_ns";
  return h;
}

inline void write_metrics_csv(std::ostream& os,
                              const std::vector<MetricsRow>& rows,
                              std::size_t early_count) {
  os << kMetricsVersionLine << '\n' << metrics_header(early_count) << '\n';
  for (const MetricsRow& r : rows) {
    os << r.step << ',' << detail::fmt_double(r.term1) << ','
       << detail::fmt_double(r.term2) << ',' << detail::fmt_double(r.term3);
    for (std::size_t i = 0; i < early_count; ++i)
      os << ',' << detail::fmt_double(i < r.early.size() ? r.early[i] : 0.0);
    os << ',' << detail::fmt_double(r.bound_basic) << ','
       << detail::fmt_double(r.bound_adaptive) << ',' << r.wall_ns << '\n';
  }
}

struct MetricsFile {
  std::vector<MetricsRow> rows;
  std::size_t early_count = 0;
};

inline MetricsFile read_metrics_csv(std::istream& is) {
  detail::expect_version_line(is, kMetricsVersionLine);
  std::string header;
  if (!std::getline(is, header)) throw SchemaMismatch("missing header row");

  MetricsFile out;
  // Derive the probe count from the header, then insist on an exact match.
  const auto fields = detail::split_csv_line(header);
  std::size_t early = 0;
  for (const std::string& f : fields)
    if (f.rfind("early_", 0) == 0) ++early;
  out.early_count = early;
  if (header != metrics_header(early))
    throw SchemaMismatch("unexpected metrics header '" + header + "'");

  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 7 + early) throw SchemaMismatch("bad metrics row");
    MetricsRow r;
    r.step = detail::parse_u64(f[0]);
    r.term1 = detail::parse_double(f[1]);
    r.term2 = detail::parse_double(f[2]);
    r.term3 = detail::parse_double(f[3]);
    for (std::size_t i = 0; i < early; ++i)
      r.early.push_back(detail::parse_double(f[4 + i]));
    r.bound_basic = detail::parse_double(f[4 + early]);
    r.bound_adaptive = detail::parse_double(f[5 + early]);
    r.wall_ns = detail::parse_u64(f[6 + early]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline MetricsFile load_metrics_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_metrics_csv(is);
}

inline void write_trace_csv(std::ostream& os,
                            const std::vector<StepStats>& trace) {
  os << kTraceVersionLine << '\n' << "step,residual_fro,k_norm2,k_floor_sq\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    os << (i + 1) << ',' << detail::fmt_double(trace[i].residual_fro) << ','
       << detail::fmt_double(trace[i].k_norm2) << ','
       << detail::fmt_double(trace[i].k_floor_sq) << '\n';
}

inline std::vector<StepStats> read_trace_csv(std::istream& is) {
  detail::expect_version_line(is, kTraceVersionLine);
  std::string header;
  if (!std::getline(is, header) ||
      header != "step,residual_fro,k_norm2,k_floor_sq")
    throw SchemaMismatch("unexpected trace header");
  std::vector<StepStats> trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 4) throw SchemaMismatch("bad trace row");
    trace.push_back({detail::parse_double(f[1]), detail::parse_double(f[2]),
                     detail::parse_double(f[3])});
  }
  return trace;
}

struct LabeledBound {
  std::string pass;  // "direct" or "recursive"
  BoundReport report;
};

inline void write_bounds_csv(std::ostream& os,
                             const std::vector<LabeledBound>& rows) {
  os << kBoundsVersionLine << '\n' << "pass,kind,step,measured,bound,slack\n";
  for (const LabeledBound& r : rows)
    os << r.pass << ',' << bound_kind_name(r.report.kind) << ','
       << r.report.step << ',' << detail::fmt_double(r.report.measured) << ','
       << detail::fmt_double(r.report.bound) << ','
       << detail::fmt_double(r.report.slack) << '\n';
}

} // namespace rlsedit
