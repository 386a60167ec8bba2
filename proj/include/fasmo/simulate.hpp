#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fasmo/observer.hpp"
#include "fasmo/plant.hpp"

namespace fasmo {

struct ObserverInit {
  std::vector<double> z_hat;
  std::vector<double> z_tilde;
};

/// Everything one rollout needs: the plant, the observer, both initial
/// conditions, the step, the horizon and the recording stride.
struct Scenario {
  TriangularSystem system;
  ObserverConfig observer;
  std::vector<double> z0;
  ObserverInit init;
  double dt = 1e-3;
  double horizon = 20.0;
  int record_stride = 1;

  void validate() const {
    const int n = system.dimension();
    observer.validate(n);
    if (z0.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("scenario.z0: expected " + std::to_string(n) +
                                  " entries, got " + std::to_string(z0.size()));
    }
    if (init.z_hat.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("scenario.observer_init.z_hat: expected " + std::to_string(n) +
                                  " entries, got " + std::to_string(init.z_hat.size()));
    }
    if (init.z_tilde.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("scenario.observer_init.z_tilde: expected " +
                                  std::to_string(n) + " entries, got " +
                                  std::to_string(init.z_tilde.size()));
    }
    if (!(dt > 0.0)) throw std::invalid_argument("scenario.dt must be > 0");
    if (!(horizon >= dt)) throw std::invalid_argument("scenario.T must be >= dt");
    if (record_stride < 1) throw std::invalid_argument("scenario.record_stride must be >= 1");
  }
};

/// Column-major record of a rollout. All per-channel blocks have `channels`
/// columns; gates has channels-1 (E_1..E_{m-1}). gamma is recorded for every
/// variant (constant 1/2 for sign/fuzzy); `adaptive` marks whether it is a
/// real trajectory.
struct SimulationTrace {
  int channels = 0;
  double dt = 0.0;
  int record_stride = 1;
  bool adaptive = false;
  std::vector<double> times;
  std::vector<std::vector<double>> z;        // truth
  std::vector<std::vector<double>> z_hat;    // estimates
  std::vector<std::vector<double>> z_tilde;  // internal states incl. theta
  std::vector<std::vector<double>> eps;      // error channels
  std::vector<std::vector<double>> gates;    // E_1..E_{m-1}, 0/1
  std::vector<double> gamma;
  std::vector<double> loss;

  std::size_t rows() const noexcept { return times.size(); }
};

/// Bitwise equality of two traces (no tolerance); the determinism and
/// variant-degeneracy guarantees are exact, not approximate.
inline bool bitwise_equal(const SimulationTrace& a, const SimulationTrace& b) {
  return a.channels == b.channels && a.times == b.times && a.z == b.z && a.z_hat == b.z_hat &&
         a.z_tilde == b.z_tilde && a.eps == b.eps && a.gates == b.gates && a.gamma == b.gamma &&
         a.loss == b.loss;
}

/// Observer rollout against a precomputed truth trajectory (as produced by
/// simulate_truth with the scenario's system, z0, dt and horizon). The
/// observer consumes y = z1 at the pre-step time; for the adaptive variant
/// two twin observers run in lockstep at exponents gamma +/- fd_delta and the
/// exponent descends their central-difference loss gradient after each step.
inline SimulationTrace run_against(const Scenario& sc, const TruthTrajectory& truth) {
  sc.validate();
  const int m = sc.system.dimension();
  if (truth.states.size() != static_cast<std::size_t>(m) || truth.samples() == 0) {
    throw std::invalid_argument("run: truth trajectory does not match the scenario system");
  }
  const ObserverConfig& cfg = sc.observer;
  const bool adaptive = cfg.variant == ObserverVariant::Adaptive;
  const auto bank = resolve_switch_bank(cfg);
  const std::size_t last = truth.samples() - 1;
  const std::size_t stride = static_cast<std::size_t>(sc.record_stride);

  SimulationTrace trace;
  trace.channels = m;
  trace.dt = sc.dt;
  trace.record_stride = sc.record_stride;
  trace.adaptive = adaptive;
  const std::size_t rows = last / stride + 1;
  trace.times.reserve(rows);
  trace.z.assign(m, {});
  trace.z_hat.assign(m, {});
  trace.z_tilde.assign(m, {});
  trace.eps.assign(m, {});
  trace.gates.assign(m - 1, {});
  for (int i = 0; i < m; ++i) {
    trace.z[i].reserve(rows);
    trace.z_hat[i].reserve(rows);
    trace.z_tilde[i].reserve(rows);
    trace.eps[i].reserve(rows);
  }
  for (auto& g : trace.gates) g.reserve(rows);
  trace.gamma.reserve(rows);
  trace.loss.reserve(rows);

  // The recorded gamma is the effective exponent: the nominal trajectory for
  // the adaptive variant, the fixed 1/2 otherwise.
  ObserverState st{sc.init.z_hat, sc.init.z_tilde, adaptive ? cfg.gamma0 : 0.5};
  ObserverState twin_plus = st;
  ObserverState twin_minus = st;

  double t = 0.0;
  try {
    for (std::size_t k = 0;; ++k) {
      t = truth.times[k];
      const double y = truth.states[0][k];
      const std::vector<double> eps = observer_errors(st, y);

      if (k % stride == 0) {
        trace.times.push_back(t);
        for (int i = 0; i < m; ++i) {
          trace.z[i].push_back(truth.states[i][k]);
          trace.z_hat[i].push_back(st.z_hat[i]);
          trace.z_tilde[i].push_back(st.z_tilde[i]);
          trace.eps[i].push_back(eps[i]);
        }
        double open = 1.0;
        for (int i = 1; i < m; ++i) {
          if (!(std::abs(eps[i - 1]) <= cfg.gate_threshold)) open = 0.0;
          trace.gates[i - 1].push_back(open);
        }
        trace.gamma.push_back(st.gamma);
        trace.loss.push_back(observer_loss(cfg, eps));
      }
      if (k == last) break;

      double grad = 0.0;
      if (adaptive) {
        // Gradient from the twins' start-of-step losses; the twins track the
        // nominal exponent offset by +/- fd_delta and are never re-synced.
        const auto eps_plus = observer_errors(twin_plus, y);
        const auto eps_minus = observer_errors(twin_minus, y);
        grad = (observer_loss(cfg, eps_plus) - observer_loss(cfg, eps_minus)) /
               (2.0 * cfg.fd_delta);
        twin_plus = step_cascade(cfg, std::move(twin_plus), y, sc.system, sc.dt,
                                 st.gamma + cfg.fd_delta, bank);
        twin_minus = step_cascade(cfg, std::move(twin_minus), y, sc.system, sc.dt,
                                  st.gamma - cfg.fd_delta, bank);
      }
      const double exponent = adaptive ? st.gamma : 0.5;
      const double gamma_prev = st.gamma;
      st = step_cascade(cfg, std::move(st), y, sc.system, sc.dt, exponent, bank);
      if (adaptive) st.gamma = adapt_gamma(cfg, gamma_prev, grad, sc.dt);
    }
  } catch (const SimulationError& e) {
    throw SimulationError(std::string(e.what()) + " (observer step from t = " +
                          std::to_string(t) + ")");
  }
  return trace;
}

/// Lockstep plant/observer rollout: the plant is advanced by forward Euler on
/// the same grid and the observer reads y = z1 at each grid point.
inline SimulationTrace run(const Scenario& sc) {
  sc.validate();
  const TruthTrajectory truth = simulate_truth(sc.system, sc.z0, sc.dt, sc.horizon);
  return run_against(sc, truth);
}

}  // namespace fasmo
