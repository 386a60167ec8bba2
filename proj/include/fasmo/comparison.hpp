#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fasmo/metrics.hpp"
#include "fasmo/simulate.hpp"

namespace fasmo {

struct RunResult {
  SimulationTrace trace;
  MetricsReport metrics;
};

/// Run a set of scenarios that share a system and initial conditions (the
/// caller's contract) and attach metrics to each. Scenarios with identical
/// (z0, dt, horizon) share one plant rollout, so their truth columns are the
/// same samples, not merely re-deterministic ones.
inline std::vector<RunResult> run_comparison(std::span<const Scenario> scenarios,
                                             const MetricsOptions& opts = {}) {
  if (scenarios.size() < 2) {
    throw std::invalid_argument("run_comparison: need at least 2 scenarios");
  }
  struct CachedTruth {
    std::vector<double> z0;
    double dt;
    double horizon;
    TruthTrajectory truth;
  };
  std::vector<CachedTruth> cache;
  std::vector<RunResult> results;
  results.reserve(scenarios.size());
  for (const Scenario& sc : scenarios) {
    sc.validate();
    const TruthTrajectory* truth = nullptr;
    for (const auto& c : cache) {
      if (c.dt == sc.dt && c.horizon == sc.horizon && c.z0 == sc.z0) {
        truth = &c.truth;
        break;
      }
    }
    if (truth == nullptr) {
      cache.push_back({sc.z0, sc.dt, sc.horizon,
                       simulate_truth(sc.system, sc.z0, sc.dt, sc.horizon)});
      truth = &cache.back().truth;
    }
    SimulationTrace trace = run_against(sc, *truth);
    MetricsReport metrics = compute_metrics(trace, opts);
    results.push_back({std::move(trace), std::move(metrics)});
  }
  return results;
}

}  // namespace fasmo
