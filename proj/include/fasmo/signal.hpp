#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace fasmo {

/// Named scalar function of time. The closed-form kinds (zero, constant,
/// sine) carry exact analytic derivatives and bounds; custom signals carry a
/// caller-supplied bound and have no derivative.
class Signal {
 public:
  enum class Kind { Zero, Constant, Sine, Custom };

  static Signal zero() { return Signal(Kind::Zero); }

  static Signal constant(double value) {
    Signal s(Kind::Constant);
    s.value_ = value;
    return s;
  }

  static Signal sine(double amplitude, double angular_frequency, double phase = 0.0) {
    Signal s(Kind::Sine);
    s.amplitude_ = amplitude;
    s.omega_ = angular_frequency;
    s.phase_ = phase;
    return s;
  }

  static Signal custom(std::string name, std::function<double(double)> fn, double bound) {
    if (!fn) throw std::invalid_argument("Signal::custom: null function");
    Signal s(Kind::Custom);
    s.name_ = std::move(name);
    s.fn_ = std::move(fn);
    s.value_ = bound;
    return s;
  }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Constant: return value_;
      case Kind::Sine: return amplitude_ * std::sin(omega_ * t + phase_);
      case Kind::Custom: return fn_(t);
    }
    return 0.0;
  }

  Kind kind() const noexcept { return kind_; }

  bool has_derivative() const noexcept { return kind_ != Kind::Custom; }

  Signal derivative() const {
    switch (kind_) {
      case Kind::Zero:
      case Kind::Constant:
        return zero();
      case Kind::Sine:
        return sine(amplitude_ * omega_, omega_, phase_ + std::numbers::pi / 2);
      case Kind::Custom:
        throw std::invalid_argument("Signal: custom signal '" + name_ +
                                    "' has no analytic derivative");
    }
    return zero();
  }

  /// Upper bound on |signal(t)| over any horizon.
  double bound() const noexcept {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::Constant: return std::abs(value_);
      case Kind::Sine: return std::abs(amplitude_);
      case Kind::Custom: return value_;
    }
    return 0.0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Zero: return "zero";
      case Kind::Constant: return "constant(" + std::to_string(value_) + ")";
      case Kind::Sine:
        return "sine(amplitude=" + std::to_string(amplitude_) +
               ", omega=" + std::to_string(omega_) + ", phase=" + std::to_string(phase_) + ")";
      case Kind::Custom: return "custom(" + name_ + ")";
    }
    return "";
  }

  // Structural equality; custom signals compare by name.
  friend bool operator==(const Signal& a, const Signal& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::Zero: return true;
      case Kind::Constant: return a.value_ == b.value_;
      case Kind::Sine:
        return a.amplitude_ == b.amplitude_ && a.omega_ == b.omega_ && a.phase_ == b.phase_;
      case Kind::Custom: return a.name_ == b.name_;
    }
    return false;
  }

  double amplitude() const noexcept { return amplitude_; }
  double angular_frequency() const noexcept { return omega_; }
  double phase() const noexcept { return phase_; }
  double value() const noexcept { return value_; }

 private:
  explicit Signal(Kind kind) : kind_(kind) {}

  Kind kind_;
  double amplitude_ = 0.0;
  double omega_ = 0.0;
  double phase_ = 0.0;
  double value_ = 0.0;  // constant value, or bound for custom signals
  std::string name_;
  std::function<double(double)> fn_;
};

}  // namespace fasmo
