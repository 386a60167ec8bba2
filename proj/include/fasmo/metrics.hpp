#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fasmo/simulate.hpp"

namespace fasmo {

struct MetricsOptions {
  double window_start = 10.0;              // converged-window start for rmse/max/chattering
  std::optional<double> window_end;        // default: end of trace
  double band = 0.05;                      // convergence band
  double tail = 5.0;                       // tail duration for the averaged loss
};

struct ChannelMetrics {
  double rmse = 0.0;
  double max_abs = 0.0;
  double chattering = 0.0;
  std::optional<double> convergence_time;  // absent when the band is never held
};

struct MetricsReport {
  std::vector<ChannelMetrics> channels;
  double tail_loss = 0.0;
  std::optional<double> final_gamma;       // only meaningful for adaptive runs
};

inline double rmse(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("rmse: empty window");
  double sum = 0.0;
  for (double v : samples) sum += v * v;
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

namespace detail {

inline double total_variation(std::span<const double> x) {
  double tv = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) tv += std::abs(x[k] - x[k - 1]);
  return tv;
}

constexpr double kTruthVariationFloor = 1e-9;

}  // namespace detail

/// Excess total variation of the estimate relative to the truth over the same
/// window: max(0, TV(estimate)/max(TV(truth), floor) - 1). Near 0 means the
/// estimate moves no more than the signal it tracks; large values mean
/// high-frequency switching.
inline double chattering_index(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.empty() || truth.empty()) {
    throw std::invalid_argument("chattering_index: empty window");
  }
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("chattering_index: estimate and truth windows are misaligned");
  }
  const double tv_truth = std::max(detail::total_variation(truth), detail::kTruthVariationFloor);
  return std::max(0.0, detail::total_variation(estimate) / tv_truth - 1.0);
}

/// Smallest recorded t* such that |error| stays within the band from t* to
/// the end of the record; absent when even the final sample violates it.
inline std::optional<double> convergence_time(std::span<const double> times,
                                              std::span<const double> errors, double band) {
  if (!(band > 0.0)) throw std::invalid_argument("convergence_time: band must be > 0");
  if (times.size() != errors.size()) {
    throw std::invalid_argument("convergence_time: times and errors are misaligned");
  }
  std::size_t first_held = times.size();
  for (std::size_t k = times.size(); k-- > 0;) {
    if (!(std::abs(errors[k]) <= band)) break;
    first_held = k;
  }
  if (first_held == times.size()) return std::nullopt;
  return times[first_held];
}

/// Mean recorded loss over the final `tail` seconds of the trace.
inline double tail_loss(const SimulationTrace& trace, double tail) {
  if (trace.rows() == 0) throw std::invalid_argument("tail_loss: empty trace");
  const double t_end = trace.times.back();
  if (!(tail >= 0.0) || tail > t_end + 1e-12) {
    throw std::invalid_argument("tail_loss: tail must lie within the trace horizon");
  }
  const double cutoff = t_end - tail - 1e-9 * std::max(1.0, std::abs(t_end));
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.rows(); ++k) {
    if (trace.times[k] >= cutoff) {
      sum += trace.loss[k];
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

/// All per-channel and scalar metrics of one trace. rmse/max-abs/chattering
/// use the converged window; convergence time scans the full record.
inline MetricsReport compute_metrics(const SimulationTrace& trace,
                                     const MetricsOptions& opts = {}) {
  if (trace.rows() == 0) throw std::invalid_argument("compute_metrics: empty trace");
  const double w0 = opts.window_start - 1e-12;
  const double w1 = opts.window_end.value_or(trace.times.back()) + 1e-12;
  std::size_t i0 = trace.rows(), i1 = 0;
  for (std::size_t k = 0; k < trace.rows(); ++k) {
    if (trace.times[k] >= w0 && trace.times[k] <= w1) {
      i0 = std::min(i0, k);
      i1 = k;
    }
  }
  if (i0 == trace.rows()) {
    throw std::invalid_argument("compute_metrics: the metrics window contains no samples");
  }
  const std::size_t len = i1 - i0 + 1;

  MetricsReport report;
  report.channels.resize(trace.channels);
  for (int i = 0; i < trace.channels; ++i) {
    auto& ch = report.channels[i];
    const std::span<const double> e_win(trace.eps[i].data() + i0, len);
    ch.rmse = rmse(e_win);
    ch.max_abs = 0.0;
    for (double v : e_win) ch.max_abs = std::max(ch.max_abs, std::abs(v));
    ch.chattering = chattering_index(std::span(trace.z_hat[i].data() + i0, len),
                                     std::span(trace.z[i].data() + i0, len));
    ch.convergence_time = convergence_time(trace.times, trace.eps[i], opts.band);
  }
  report.tail_loss = tail_loss(trace, std::min(opts.tail, trace.times.back()));
  if (trace.adaptive) report.final_gamma = trace.gamma.back();
  return report;
}

}  // namespace fasmo
