#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fasmo/metrics.hpp"
#include "fasmo/simulate.hpp"

namespace fasmo {

/// Fixed CSV number format: 9 significant digits, '.' decimal separator,
/// locale-independent, byte-stable across runs.
inline std::string format_csv_number(double v) {
  std::array<char, 40> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 9);
  return std::string(buf.data(), res.ptr);
}

/// Write content to path via a temp file plus rename, so a failed run never
/// leaves a truncated output behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// Column order: t, z1..zm, zhat1..zhatm, eps1..epsm, E1..E{m-1},
/// gamma (adaptive runs only), L.
inline std::vector<std::string> trace_csv_columns(const SimulationTrace& trace) {
  std::vector<std::string> cols{"t"};
  for (int i = 1; i <= trace.channels; ++i) cols.push_back("z" + std::to_string(i));
  for (int i = 1; i <= trace.channels; ++i) cols.push_back("zhat" + std::to_string(i));
  for (int i = 1; i <= trace.channels; ++i) cols.push_back("eps" + std::to_string(i));
  for (int i = 1; i < trace.channels; ++i) cols.push_back("E" + std::to_string(i));
  if (trace.adaptive) cols.push_back("gamma");
  cols.push_back("L");
  return cols;
}

inline std::string trace_to_csv(const SimulationTrace& trace) {
  std::string out;
  out.reserve(trace.rows() * (trace.channels * 4 + 3) * 12 + 256);
  const auto cols = trace_csv_columns(trace);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out += ',';
    out += cols[c];
  }
  out += '\n';
  for (std::size_t k = 0; k < trace.rows(); ++k) {
    out += format_csv_number(trace.times[k]);
    for (int i = 0; i < trace.channels; ++i) {
      out += ',';
      out += format_csv_number(trace.z[i][k]);
    }
    for (int i = 0; i < trace.channels; ++i) {
      out += ',';
      out += format_csv_number(trace.z_hat[i][k]);
    }
    for (int i = 0; i < trace.channels; ++i) {
      out += ',';
      out += format_csv_number(trace.eps[i][k]);
    }
    for (int i = 0; i + 1 < trace.channels; ++i) {
      out += ',';
      out += format_csv_number(trace.gates[i][k]);
    }
    if (trace.adaptive) {
      out += ',';
      out += format_csv_number(trace.gamma[k]);
    }
    out += ',';
    out += format_csv_number(trace.loss[k]);
    out += '\n';
  }
  return out;
}

inline void write_trace_csv(const SimulationTrace& trace, const std::filesystem::path& path) {
  write_file_atomic(path, trace_to_csv(trace));
}

struct ComparisonRow {
  std::string name;
  std::string variant;
  MetricsReport metrics;
};

namespace detail {

inline std::optional<double> worst_convergence_time(const MetricsReport& m) {
  double worst = 0.0;
  for (const auto& ch : m.channels) {
    if (!ch.convergence_time) return std::nullopt;
    worst = std::max(worst, *ch.convergence_time);
  }
  return worst;
}

}  // namespace detail

/// CSV comparison table: per-channel rmse and chattering index, the worst
/// convergence time across channels, the tail-averaged loss and the final
/// gamma (adaptive rows only).
inline std::string comparison_to_csv(std::span<const ComparisonRow> rows) {
  if (rows.empty()) throw std::invalid_argument("comparison_to_csv: no rows");
  const std::size_t m = rows.front().metrics.channels.size();
  std::string out = "name,variant";
  for (std::size_t i = 1; i <= m; ++i) out += ",rmse_z" + std::to_string(i);
  for (std::size_t i = 1; i <= m; ++i) out += ",ci_z" + std::to_string(i);
  out += ",convergence_time,tail_loss,final_gamma\n";
  for (const auto& row : rows) {
    out += row.name;
    out += ',';
    out += row.variant;
    for (const auto& ch : row.metrics.channels) {
      out += ',';
      out += format_csv_number(ch.rmse);
    }
    for (const auto& ch : row.metrics.channels) {
      out += ',';
      out += format_csv_number(ch.chattering);
    }
    const auto tconv = detail::worst_convergence_time(row.metrics);
    out += ',';
    if (tconv) out += format_csv_number(*tconv);
    out += ',';
    out += format_csv_number(row.metrics.tail_loss);
    out += ',';
    if (row.metrics.final_gamma) out += format_csv_number(*row.metrics.final_gamma);
    out += '\n';
  }
  return out;
}

/// Human-readable rendering of the same table.
inline std::string comparison_to_text(std::span<const ComparisonRow> rows) {
  if (rows.empty()) throw std::invalid_argument("comparison_to_text: no rows");
  const std::size_t m = rows.front().metrics.channels.size();
  const auto num = [](double v) {
    std::array<char, 32> buf;
    const int len = std::snprintf(buf.data(), buf.size(), "%-12.5g", v);
    return std::string(buf.data(), static_cast<std::size_t>(len));
  };
  const auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  std::size_t name_width = 4;
  for (const auto& row : rows) name_width = std::max(name_width, row.name.size());
  name_width += 2;

  std::string out = pad("name", name_width) + pad("variant", 10);
  for (std::size_t i = 1; i <= m; ++i) out += pad("rmse_z" + std::to_string(i), 12);
  for (std::size_t i = 1; i <= m; ++i) out += pad("ci_z" + std::to_string(i), 12);
  out += pad("t_conv", 12) + pad("tail_loss", 12) + "gamma\n";
  for (const auto& row : rows) {
    out += pad(row.name, name_width) + pad(row.variant, 10);
    for (const auto& ch : row.metrics.channels) out += num(ch.rmse);
    for (const auto& ch : row.metrics.channels) out += num(ch.chattering);
    const auto tconv = detail::worst_convergence_time(row.metrics);
    out += tconv ? num(*tconv) : pad("-", 12);
    out += num(row.metrics.tail_loss);
    out += row.metrics.final_gamma ? num(*row.metrics.final_gamma) : std::string("-");
    out += '\n';
  }
  return out;
}

}  // namespace fasmo
