#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fasmo/plant.hpp"
#include "fasmo/simulate.hpp"

namespace fasmo {

/// Three-state example plant: dz1 = z2, dz2 = z3, dz3 = -z3 + d with the
/// external input d = 0.1 sin(omega t) and y = z1. The -z3 drift lives in the
/// last-stage map, eta is the input itself, so the system is ready for
/// unknown-input augmentation.
inline TriangularSystem example_3state(double omega = 1.0) {
  std::vector<PhiMap> chain{PhiMap{}, PhiMap{}};
  return TriangularSystem(3, std::move(chain), Signal::sine(0.1, omega),
                          polynomial_phi({{-1.0, {0, 0, 1}}}));
}

/// The same plant with the input promoted to z4: dz3 = -z3 + z4, dz4 = ddot.
inline TriangularSystem example_augmented(double omega = 1.0) {
  return example_3state(omega).augment_with_input(Signal::sine(0.1, omega));
}

inline const std::vector<std::string>& system_preset_names() {
  static const std::vector<std::string> names{
      "paper-example-3state", "paper-example-augmented", "paper-example-augmented-hf"};
  return names;
}

inline TriangularSystem system_preset(std::string_view name) {
  if (name == "paper-example-3state") return example_3state();
  if (name == "paper-example-augmented") return example_augmented();
  if (name == "paper-example-augmented-hf") return example_augmented(10.0);
  std::string known;
  for (const auto& n : system_preset_names()) known += " " + n;
  throw std::invalid_argument("unknown system preset '" + std::string(name) + "'; known:" +
                              known);
}

inline const std::vector<std::string>& scenario_preset_names() {
  static const std::vector<std::string> names{"fig1-sign-1e5", "fig3-sign-1e3",
                                              "fig3-fuzzy-1e3", "fig4-adaptive"};
  return names;
}

/// Observer config with the published reference gains: lambda = 15 and
/// alpha = 30 on every channel, gate threshold 0.025, and for the adaptive
/// variant gamma(0) = 0.5 with learning rate 0.004.
inline ObserverConfig reference_observer(ObserverVariant variant, int channels) {
  ObserverConfig cfg;
  cfg.variant = variant;
  cfg.lambdas.assign(channels, 15.0);
  cfg.alphas.assign(channels, 30.0);
  cfg.gate_threshold = 0.025;
  cfg.gamma0 = 0.5;
  cfg.learning_rate = variant == ObserverVariant::Adaptive ? 0.004 : 0.0;
  return cfg;
}

/// The built-in reproduction scenarios. All share the reference gains
/// (lambda = 15, alpha = 30, gate threshold 0.025) and the published initial
/// conditions; they differ in plant, step size and observer variant:
///   fig1-sign-1e5   sign observer on the 3-state plant, dt = 1e-5
///   fig3-sign-1e3   sign observer on the augmented plant, dt = 1e-3
///   fig3-fuzzy-1e3  fuzzy observer on the augmented plant, dt = 1e-3
///   fig4-adaptive   adaptive observer on the high-frequency augmented plant
///                   (d = 0.1 sin 10t), dt = 1e-3, Gamma = 0.004, gamma0 = 0.5
inline Scenario scenario_preset(std::string_view name) {
  if (name == "fig1-sign-1e5") {
    Scenario sc{example_3state(), reference_observer(ObserverVariant::Sign, 3),
                {0.2, 0.2, 0.2}, ObserverInit{{0.05, 0.0, 0.05}, {0.05, 0.0, 0.05}},
                1e-5, 20.0, 10};
    return sc;
  }
  const ObserverInit aug_init{{0.05, 0.0, 0.05, 0.05}, {0.05, 0.0, 0.0, 0.05}};
  const std::vector<double> aug_z0{0.2, 0.2, 0.2, 0.2};
  if (name == "fig3-sign-1e3") {
    return Scenario{example_augmented(), reference_observer(ObserverVariant::Sign, 4),
                    aug_z0, aug_init, 1e-3, 20.0, 1};
  }
  if (name == "fig3-fuzzy-1e3") {
    return Scenario{example_augmented(), reference_observer(ObserverVariant::Fuzzy, 4),
                    aug_z0, aug_init, 1e-3, 20.0, 1};
  }
  if (name == "fig4-adaptive") {
    return Scenario{example_augmented(10.0),
                    reference_observer(ObserverVariant::Adaptive, 4),
                    aug_z0, aug_init, 1e-3, 20.0, 1};
  }
  std::string known;
  for (const auto& n : scenario_preset_names()) known += " " + n;
  throw std::invalid_argument("unknown scenario preset '" + std::string(name) + "'; known:" +
                              known);
}

}  // namespace fasmo
