#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fasmo/fuzzy.hpp"
#include "fasmo/plant.hpp"

namespace fasmo {

enum class ObserverVariant { Sign, Fuzzy, Adaptive };

inline std::string to_string(ObserverVariant v) {
  switch (v) {
    case ObserverVariant::Sign: return "sign";
    case ObserverVariant::Fuzzy: return "fuzzy";
    case ObserverVariant::Adaptive: return "adaptive";
  }
  return "";
}

inline ObserverVariant variant_from_string(std::string_view name) {
  if (name == "sign") return ObserverVariant::Sign;
  if (name == "fuzzy") return ObserverVariant::Fuzzy;
  if (name == "adaptive") return ObserverVariant::Adaptive;
  throw std::invalid_argument("unknown observer variant '" + std::string(name) +
                              "' (expected sign, fuzzy or adaptive)");
}

/// Strict sign with sign(0) = 0, so the zero-error fixed point is exact.
inline double sign_switch(double eps) noexcept {
  return static_cast<double>(eps > 0.0) - static_cast<double>(eps < 0.0);
}

/// Switching function for one error channel: either the strict sign or a
/// fuzzy inference system.
class SwitchFunction {
 public:
  static SwitchFunction sign() { return SwitchFunction(); }
  static SwitchFunction fuzzy(FuzzySystem system) {
    SwitchFunction s;
    s.system_ = std::move(system);
    return s;
  }

  double operator()(double eps) const { return system_ ? system_->infer(eps) : sign_switch(eps); }

  bool is_sign() const noexcept { return !system_.has_value(); }
  const FuzzySystem* system() const noexcept { return system_ ? &*system_ : nullptr; }

 private:
  std::optional<FuzzySystem> system_;
};

/// Standard channel assignment: channel 1 uses psi_1, channel 2 uses psi_2,
/// every later channel uses psi_3.
inline std::vector<SwitchFunction> standard_switch_bank(int channels) {
  std::vector<SwitchFunction> bank;
  bank.reserve(channels);
  for (int i = 0; i < channels; ++i) {
    bank.push_back(SwitchFunction::fuzzy(build_standard_psi(std::min(i + 1, 3))));
  }
  return bank;
}

struct ObserverConfig {
  ObserverVariant variant = ObserverVariant::Sign;
  std::vector<double> lambdas;  // correction factors, one per channel
  std::vector<double> alphas;   // observer gains, one per channel
  double gate_threshold = 0.025;
  double gamma0 = 0.5;
  double learning_rate = 0.0;  // gradient step size for the adaptive exponent
  double gamma_min = 0.05;
  double gamma_max = 1.0;
  double fd_delta = 1e-3;  // twin-observer exponent offset
  bool loss_includes_last = true;
  // Per-channel switch override; empty selects the standard psi assignment
  // for the fuzzy/adaptive variants (the sign variant always uses signs).
  std::vector<SwitchFunction> switches;

  int channels() const noexcept { return static_cast<int>(lambdas.size()); }

  void validate(int system_dimension) const {
    if (lambdas.size() != static_cast<std::size_t>(system_dimension)) {
      throw std::invalid_argument("observer.lambdas: expected " +
                                  std::to_string(system_dimension) + " entries, got " +
                                  std::to_string(lambdas.size()));
    }
    if (alphas.size() != static_cast<std::size_t>(system_dimension)) {
      throw std::invalid_argument("observer.alphas: expected " +
                                  std::to_string(system_dimension) + " entries, got " +
                                  std::to_string(alphas.size()));
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (!(lambdas[i] > 0.0)) {
        throw std::invalid_argument("observer.lambdas: lambda_" + std::to_string(i + 1) +
                                    " must be > 0 (got " + std::to_string(lambdas[i]) + ")");
      }
    }
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      if (!(alphas[i] > 0.0)) {
        throw std::invalid_argument("observer.alphas: alpha_" + std::to_string(i + 1) +
                                    " must be > 0 (got " + std::to_string(alphas[i]) + ")");
      }
    }
    if (!(gate_threshold > 0.0)) {
      throw std::invalid_argument("observer.gate_threshold must be > 0");
    }
    if (!(gamma_min > 0.0 && gamma_min <= gamma0 && gamma0 <= gamma_max && gamma_max <= 1.0)) {
      throw std::invalid_argument(
          "observer: need 0 < gamma_min <= gamma0 <= gamma_max <= 1 (got gamma_min=" +
          std::to_string(gamma_min) + ", gamma0=" + std::to_string(gamma0) +
          ", gamma_max=" + std::to_string(gamma_max) + ")");
    }
    if (!(learning_rate >= 0.0)) {
      throw std::invalid_argument("observer.learning_rate must be >= 0");
    }
    if (!(fd_delta > 0.0)) {
      throw std::invalid_argument("observer.fd_delta must be > 0");
    }
    if (!switches.empty() && switches.size() != static_cast<std::size_t>(system_dimension)) {
      throw std::invalid_argument("observer.switches: expected " +
                                  std::to_string(system_dimension) + " entries, got " +
                                  std::to_string(switches.size()));
    }
  }
};

/// Full observer state: m estimates zhat_1..zhat_m and m internal states
/// (ztilde_2..ztilde_m followed by theta_tilde). In the augmented
/// configuration the last estimate channel is the unknown-input estimate.
struct ObserverState {
  std::vector<double> z_hat;
  std::vector<double> z_tilde;
  double gamma = 0.5;
};

/// Prefix gate E_i over the supplied errors (eps_1..eps_i): 1 iff every
/// |eps_j| <= threshold. The empty prefix is E_0 = 1, so stage 1 is always
/// active.
inline int gate(std::span<const double> errors, double threshold) {
  for (double e : errors) {
    if (!(std::abs(e) <= threshold)) return 0;
  }
  return 1;
}

namespace detail {

// |eps|^gamma with the 0^gamma = 0 convention. gamma == 1/2 routes through
// sqrt, so a frozen adaptive exponent reproduces the fixed-exponent variants
// bitwise.
inline double pow_abs(double eps, double gamma) {
  const double a = std::abs(eps);
  if (a == 0.0) return 0.0;
  return gamma == 0.5 ? std::sqrt(a) : std::pow(a, gamma);
}

}  // namespace detail

/// Correction term lambda * |eps|^gamma * switch.
inline double correction(double lambda, double eps, double gamma, double switch_value) {
  return lambda * detail::pow_abs(eps, gamma) * switch_value;
}

/// Sum of squared error channels.
inline double loss(std::span<const double> errors) {
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return sum;
}

/// Loss over the channels selected by the config (optionally dropping the
/// last, unknown-input channel).
inline double observer_loss(const ObserverConfig& cfg, std::span<const double> errors) {
  if (!cfg.loss_includes_last && !errors.empty()) {
    return loss(errors.first(errors.size() - 1));
  }
  return loss(errors);
}

/// One gradient step on the exponent, clamped to the configured bounds.
inline double adapt_gamma(const ObserverConfig& cfg, double gamma, double grad, double dt) {
  return std::clamp(gamma - dt * cfg.learning_rate * grad, cfg.gamma_min, cfg.gamma_max);
}

/// Error channels from the current state and measurement: eps_1 = y - zhat_1,
/// eps_i = ztilde_i - zhat_i for i >= 2.
inline std::vector<double> observer_errors(const ObserverState& st, double y) {
  const std::size_t m = st.z_hat.size();
  std::vector<double> eps(m);
  eps[0] = y - st.z_hat[0];
  for (std::size_t j = 1; j < m; ++j) eps[j] = st.z_tilde[j - 1] - st.z_hat[j];
  return eps;
}

/// The switch bank a config resolves to: signs for the sign variant, the
/// configured (or standard) fuzzy systems otherwise.
inline std::vector<SwitchFunction> resolve_switch_bank(const ObserverConfig& cfg) {
  const int m = cfg.channels();
  if (cfg.variant == ObserverVariant::Sign) {
    return std::vector<SwitchFunction>(m, SwitchFunction::sign());
  }
  if (!cfg.switches.empty()) return cfg.switches;
  return standard_switch_bank(m);
}

/// One explicit Euler step of the whole cascade with an explicit exponent and
/// switch bank. Everything is read from the start-of-step snapshot: errors,
/// gates and the Phi arguments (y, ztilde_2..ztilde_i) all use pre-update
/// values, so the stages advance simultaneously.
inline ObserverState step_cascade(const ObserverConfig& cfg, ObserverState st, double y,
                                  const TriangularSystem& sys, double dt, double exponent,
                                  std::span<const SwitchFunction> bank) {
  const int m = cfg.channels();
  if (st.z_hat.size() != static_cast<std::size_t>(m) ||
      st.z_tilde.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("step_observer: state dimension does not match the config");
  }
  if (bank.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("step_observer: switch bank dimension mismatch");
  }

  const std::vector<double> eps = observer_errors(st, y);
  std::vector<double> args(m);  // snapshot of (y, ztilde_2..ztilde_m)
  args[0] = y;
  for (int j = 1; j < m; ++j) args[j] = st.z_tilde[j - 1];

  bool gate_open = true;
  for (int j = 0; j < m; ++j) {
    if (j >= 1) gate_open = gate_open && std::abs(eps[j - 1]) <= cfg.gate_threshold;
    if (!gate_open) break;  // gates are nested; every later stage is off too
    const double sw = bank[j](eps[j]);
    const double corr = correction(cfg.lambdas[j], eps[j], exponent, sw);
    const double ph = sys.phi(j + 1, std::span(args.data(), static_cast<std::size_t>(j + 1)));
    st.z_hat[j] += dt * (st.z_tilde[j] + corr + ph);
    st.z_tilde[j] += dt * (cfg.alphas[j] * sw);
    if (!std::isfinite(st.z_hat[j]) || !std::isfinite(st.z_tilde[j])) {
      throw SimulationError("step_observer: non-finite estimate in channel " +
                            std::to_string(j + 1));
    }
  }
  return st;
}

/// One step of the configured variant: sign and fuzzy use the fixed 1/2
/// exponent, adaptive uses the state's current gamma. Convenience wrapper
/// over step_cascade that resolves the switch bank per call; rollouts resolve
/// it once instead.
inline ObserverState step_observer(const ObserverConfig& cfg, ObserverState st, double y,
                                   const TriangularSystem& sys, double dt) {
  cfg.validate(sys.dimension());
  const auto bank = resolve_switch_bank(cfg);
  const double exponent = cfg.variant == ObserverVariant::Adaptive ? st.gamma : 0.5;
  return step_cascade(cfg, std::move(st), y, sys, dt, exponent, bank);
}

}  // namespace fasmo
