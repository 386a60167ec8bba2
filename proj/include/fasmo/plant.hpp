#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fasmo/signal.hpp"

namespace fasmo {

/// Nonlinearity of stage i; receives exactly the first i states, which is
/// what keeps the triangular dependence structural rather than a convention.
using PhiMap = std::function<double(std::span<const double>)>;

/// One monomial of a polynomial nonlinearity: coef * prod_j z_j^powers[j].
/// powers may be shorter than the state prefix; missing exponents are 0.
struct PolyTerm {
  double coef = 0.0;
  std::vector<int> powers;
};

namespace detail {

inline double ipow(double base, int exponent) {
  double r = 1.0;
  for (int k = 0; k < exponent; ++k) r *= base;
  return r;
}

}  // namespace detail

inline PhiMap polynomial_phi(std::vector<PolyTerm> terms) {
  for (const auto& term : terms) {
    for (int p : term.powers) {
      if (p < 0) throw std::invalid_argument("polynomial_phi: negative exponent");
    }
  }
  return [terms = std::move(terms)](std::span<const double> states) {
    double sum = 0.0;
    for (const auto& term : terms) {
      if (term.powers.size() > states.size()) {
        throw std::invalid_argument(
            "polynomial_phi: term references states beyond the stage prefix");
      }
      double v = term.coef;
      for (std::size_t j = 0; j < term.powers.size(); ++j) {
        v *= detail::ipow(states[j], term.powers[j]);
      }
      sum += v;
    }
    return sum;
  };
}

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// System in triangular form with measured output y = z_1:
///
///   dz_i/dt = z_{i+1} + Phi_i(z_1..z_i)            for i = 1..n-1
///   dz_n/dt = eta(t) [+ Phi_n(z_1..z_n) if present]
///
/// Chain maps may be empty (zero). The optional last-stage map carries a
/// known drift of the final state, e.g. the absorbed -z3 after promoting an
/// unknown input to a state.
class TriangularSystem {
 public:
  TriangularSystem(int dimension, std::vector<PhiMap> chain, Signal eta,
                   std::optional<PhiMap> last = std::nullopt)
      : dimension_(dimension), chain_(std::move(chain)), last_(std::move(last)),
        eta_(std::move(eta)) {
    if (dimension_ < 2) {
      throw std::invalid_argument("TriangularSystem: dimension must be >= 2");
    }
    if (chain_.size() != static_cast<std::size_t>(dimension_ - 1)) {
      throw std::invalid_argument(
          "TriangularSystem: need exactly dimension-1 chain nonlinearities (got " +
          std::to_string(chain_.size()) + " for dimension " + std::to_string(dimension_) + ")");
    }
  }

  int dimension() const noexcept { return dimension_; }
  const Signal& eta() const noexcept { return eta_; }
  double eta_bound() const noexcept { return eta_.bound(); }
  bool has_last_phi() const noexcept { return last_.has_value(); }

  /// Phi_stage evaluated on the first `stage` states; absent and empty maps
  /// evaluate to 0. stage is 1-based and at most dimension.
  double phi(int stage, std::span<const double> first_states) const {
    if (stage < 1 || stage > dimension_) {
      throw std::invalid_argument("TriangularSystem::phi: stage out of range");
    }
    if (first_states.size() != static_cast<std::size_t>(stage)) {
      throw std::invalid_argument("TriangularSystem::phi: expected exactly " +
                                  std::to_string(stage) + " states");
    }
    if (stage == dimension_) {
      return last_ ? (*last_)(first_states) : 0.0;
    }
    const PhiMap& map = chain_[stage - 1];
    return map ? map(first_states) : 0.0;
  }

  void derivative(double t, std::span<const double> z, std::span<double> dz) const {
    if (z.size() != static_cast<std::size_t>(dimension_) || dz.size() != z.size()) {
      throw std::invalid_argument("TriangularSystem::derivative: state dimension mismatch");
    }
    for (int i = 0; i < dimension_ - 1; ++i) {
      dz[i] = z[i + 1] + phi(i + 1, z.first(i + 1));
    }
    dz[dimension_ - 1] = eta_(t);
    if (last_) dz[dimension_ - 1] += (*last_)(z);
  }

  std::vector<double> derivative(double t, std::span<const double> z) const {
    std::vector<double> dz(z.size());
    derivative(t, z, dz);
    return dz;
  }

  /// Promote the unknown input to a new last state: the returned system has
  /// dimension n+1, the old last-stage drift becomes the chain map of stage
  /// n, and the new eta is the exact derivative of the input. Requires the
  /// current eta to be the input signal itself (dz_n = input + Phi_n) and the
  /// input to have an analytic derivative.
  TriangularSystem augment_with_input(const Signal& input) const {
    if (!(eta_ == input)) {
      throw std::invalid_argument(
          "augment_with_input: the system's eta must be the input signal being promoted "
          "(eta is " + eta_.describe() + ", input is " + input.describe() + ")");
    }
    if (!input.has_derivative()) {
      throw std::invalid_argument("augment_with_input: input " + input.describe() +
                                  " has no analytic derivative");
    }
    std::vector<PhiMap> chain = chain_;
    chain.push_back(last_ ? *last_ : PhiMap{});
    return TriangularSystem(dimension_ + 1, std::move(chain), input.derivative());
  }

 private:
  int dimension_;
  std::vector<PhiMap> chain_;
  std::optional<PhiMap> last_;
  Signal eta_;
};

/// Ground-truth rollout, column-major: states[i][k] is state i+1 at times[k].
struct TruthTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;

  std::size_t samples() const noexcept { return times.size(); }
};

namespace detail {

inline long long step_count(double dt, double horizon) {
  const double raw = horizon / dt;
  // Absorb the representation error of horizon/dt so a nominally integer
  // ratio lands on the intended step count.
  return static_cast<long long>(std::floor(raw + std::max(1e-9, raw * 1e-12)));
}

}  // namespace detail

/// Forward-Euler rollout at fixed step dt over [0, horizon]; returns all
/// floor(horizon/dt)+1 samples including t = 0. Aborts on the first
/// non-finite state.
inline TruthTrajectory simulate_truth(const TriangularSystem& sys, std::span<const double> z0,
                                      double dt, double horizon) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_truth: dt must be > 0");
  if (!(horizon >= dt)) throw std::invalid_argument("simulate_truth: horizon must be >= dt");
  const int n = sys.dimension();
  if (z0.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("simulate_truth: z0 dimension mismatch");
  }
  const long long steps = detail::step_count(dt, horizon);
  TruthTrajectory out;
  out.times.reserve(steps + 1);
  out.states.assign(n, {});
  for (auto& col : out.states) col.reserve(steps + 1);

  std::vector<double> z(z0.begin(), z0.end());
  std::vector<double> dz(n);
  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    out.times.push_back(t);
    for (int i = 0; i < n; ++i) out.states[i].push_back(z[i]);
    if (k == steps) break;
    sys.derivative(t, z, dz);
    for (int i = 0; i < n; ++i) {
      z[i] += dt * dz[i];
      if (!std::isfinite(z[i])) {
        throw SimulationError("simulate_truth: state z" + std::to_string(i + 1) +
                              " became non-finite at t = " + std::to_string(t + dt) +
                              " (step " + std::to_string(k + 1) + ")");
      }
    }
  }
  return out;
}

}  // namespace fasmo
