#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fasmo {

/// Triangular membership function on the universe [-1, 1], defined by
/// (left-foot, peak, right-foot). A boundary set saturates into a shoulder by
/// collapsing its outer foot onto the peak (left == peak or peak == right),
/// in which case the flat side evaluates to 1.
class MembershipFunction {
 public:
  MembershipFunction(double left_foot, double peak, double right_foot)
      : left_(left_foot), peak_(peak), right_(right_foot) {
    if (!(left_ <= peak_ && peak_ <= right_)) {
      throw std::invalid_argument(
          "MembershipFunction: breakpoints must satisfy left <= peak <= right");
    }
  }

  /// Piecewise-linear degree in [0, 1]; total for any finite x.
  double evaluate(double x) const noexcept {
    if (x <= peak_) {
      if (left_ == peak_) return 1.0;
      if (x <= left_) return 0.0;
      return (x - left_) / (peak_ - left_);
    }
    if (peak_ == right_) return 1.0;
    if (x >= right_) return 0.0;
    return (right_ - x) / (right_ - peak_);
  }

  double left_foot() const noexcept { return left_; }
  double peak() const noexcept { return peak_; }
  double right_foot() const noexcept { return right_; }

 private:
  double left_;
  double peak_;
  double right_;
};

inline double eval_membership(const MembershipFunction& mf, double x) noexcept {
  return mf.evaluate(x);
}

struct LabeledSet {
  std::string label;
  MembershipFunction shape;
};

/// One Mamdani rule: if the input is `antecedent` then the output is
/// `consequent`. Both labels must exist in their respective set lists.
struct FuzzyRule {
  std::string antecedent;
  std::string consequent;
};

/// Mamdani fuzzy inference system with min implication, max aggregation and
/// centroid defuzzification over a uniform grid on [-1, 1].
///
/// The grid has an odd point count so 0 is a grid point, and the centroid
/// sums are accumulated in mirror pairs around it. With the (enforced)
/// odd-symmetric membership layout this makes infer(-x) == -infer(x) hold
/// bitwise and infer(0) == 0 exactly, so a zero-error observer channel stays
/// exactly at rest.
///
/// Immutable after construction; infer() is a pure function and safe for
/// concurrent use.
class FuzzySystem {
 public:
  static constexpr int kDefaultResolution = 1001;

  FuzzySystem(std::vector<LabeledSet> input_sets, std::vector<LabeledSet> output_sets,
              std::vector<FuzzyRule> rules, double input_scale = 1.0,
              int resolution = kDefaultResolution)
      : input_sets_(std::move(input_sets)),
        output_sets_(std::move(output_sets)),
        rules_(std::move(rules)),
        input_scale_(input_scale),
        resolution_(resolution) {
    if (!(input_scale_ > 0.0)) {
      throw std::invalid_argument("FuzzySystem: input_scale must be > 0");
    }
    if (resolution_ < 3 || resolution_ % 2 == 0) {
      throw std::invalid_argument(
          "FuzzySystem: defuzzification resolution must be an odd count >= 3");
    }
    if (input_sets_.empty() || output_sets_.empty() || rules_.empty()) {
      throw std::invalid_argument("FuzzySystem: sets and rules must be non-empty");
    }
    resolve_rules();
    check_coverage();
    check_mirror_symmetry();
  }

  /// Crisp inference: scale the input by 1/input_scale, clamp to [-1, 1],
  /// activate rules, clip and aggregate output sets, return the centroid.
  /// Returns 0 for a zero-area aggregate (unreachable with covering inputs).
  double infer(double epsilon) const {
    const double scaled = std::clamp(epsilon / input_scale_, -1.0, 1.0);
    // A rule with zero activation clips its consequent to zero everywhere and
    // cannot affect the max-aggregate, so only active rules are kept.
    std::vector<std::pair<double, const MembershipFunction*>> active;
    active.reserve(rule_index_.size());
    for (const auto& [ant, con] : rule_index_) {
      const double a = input_sets_[ant].shape.evaluate(scaled);
      if (a > 0.0) active.emplace_back(a, &output_sets_[con].shape);
    }
    const auto aggregate = [&active](double x) {
      double best = 0.0;
      for (const auto& [a, mf] : active) {
        best = std::max(best, std::min(a, mf->evaluate(x)));
      }
      return best;
    };
    const int half = resolution_ / 2;
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < half; ++k) {
      // x < 0 and -x pair up exactly; a symmetric aggregate cancels to 0.
      const double x = static_cast<double>(k - half) / half;
      const double mu_lo = aggregate(x);
      const double mu_hi = aggregate(-x);
      num += x * (mu_lo - mu_hi);
      den += mu_lo + mu_hi;
    }
    den += aggregate(0.0);
    if (den <= 0.0) return 0.0;
    return num / den;
  }

  const std::vector<LabeledSet>& input_sets() const noexcept { return input_sets_; }
  const std::vector<LabeledSet>& output_sets() const noexcept { return output_sets_; }
  const std::vector<FuzzyRule>& rules() const noexcept { return rules_; }
  double input_scale() const noexcept { return input_scale_; }
  int resolution() const noexcept { return resolution_; }

 private:
  static std::size_t find_label(const std::vector<LabeledSet>& sets, std::string_view label) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (sets[i].label == label) return i;
    }
    return sets.size();
  }

  void resolve_rules() {
    for (std::size_t i = 0; i < input_sets_.size(); ++i) {
      for (std::size_t j = i + 1; j < input_sets_.size(); ++j) {
        if (input_sets_[i].label == input_sets_[j].label) {
          throw std::invalid_argument("FuzzySystem: duplicate input label '" +
                                      input_sets_[i].label + "'");
        }
      }
    }
    rule_index_.reserve(rules_.size());
    for (const auto& rule : rules_) {
      const std::size_t ant = find_label(input_sets_, rule.antecedent);
      if (ant == input_sets_.size()) {
        throw std::invalid_argument("FuzzySystem: rule antecedent '" + rule.antecedent +
                                    "' is not an input set label");
      }
      const std::size_t con = find_label(output_sets_, rule.consequent);
      if (con == output_sets_.size()) {
        throw std::invalid_argument("FuzzySystem: rule consequent '" + rule.consequent +
                                    "' is not an output set label");
      }
      rule_index_.emplace_back(ant, con);
    }
  }

  // The input sets must cover the whole universe: at every sampled x the
  // total activated degree stays positive, so the aggregate never has zero
  // area for an in-universe input.
  void check_coverage() const {
    constexpr int kSamples = 2001;
    for (int k = 0; k < kSamples; ++k) {
      const double x = -1.0 + 2.0 * k / (kSamples - 1);
      double total = 0.0;
      for (const auto& [ant, con] : rule_index_) {
        total += input_sets_[ant].shape.evaluate(x);
      }
      if (!(total > 1e-9)) {
        throw std::invalid_argument("FuzzySystem: input sets leave a coverage gap near x = " +
                                    std::to_string(x));
      }
    }
  }

  static std::size_t find_mirror(const std::vector<LabeledSet>& sets, std::size_t i) {
    const auto& s = sets[i].shape;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      const auto& t = sets[j].shape;
      if (t.left_foot() == -s.right_foot() && t.peak() == -s.peak() &&
          t.right_foot() == -s.left_foot()) {
        return j;
      }
    }
    return sets.size();
  }

  // Odd symmetry of the inferred output requires the layout itself to be
  // mirror symmetric: every set has a mirrored partner and the rule base maps
  // mirrored antecedents to mirrored consequents.
  void check_mirror_symmetry() const {
    std::vector<std::size_t> in_mirror(input_sets_.size());
    std::vector<std::size_t> out_mirror(output_sets_.size());
    for (std::size_t i = 0; i < input_sets_.size(); ++i) {
      in_mirror[i] = find_mirror(input_sets_, i);
      if (in_mirror[i] == input_sets_.size()) {
        throw std::invalid_argument("FuzzySystem: input set '" + input_sets_[i].label +
                                    "' has no mirrored partner about 0");
      }
    }
    for (std::size_t i = 0; i < output_sets_.size(); ++i) {
      out_mirror[i] = find_mirror(output_sets_, i);
      if (out_mirror[i] == output_sets_.size()) {
        throw std::invalid_argument("FuzzySystem: output set '" + output_sets_[i].label +
                                    "' has no mirrored partner about 0");
      }
    }
    for (const auto& [ant, con] : rule_index_) {
      const std::size_t want_ant = in_mirror[ant];
      const std::size_t want_con = out_mirror[con];
      bool found = false;
      for (const auto& [a, c] : rule_index_) {
        if (a == want_ant && c == want_con) {
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::invalid_argument("FuzzySystem: rule base is not mirror symmetric (rule '" +
                                    input_sets_[ant].label + "' -> '" + output_sets_[con].label +
                                    "' lacks its mirrored counterpart)");
      }
    }
  }

  std::vector<LabeledSet> input_sets_;
  std::vector<LabeledSet> output_sets_;
  std::vector<FuzzyRule> rules_;
  std::vector<std::pair<std::size_t, std::size_t>> rule_index_;
  double input_scale_;
  int resolution_;
};

inline double infer(const FuzzySystem& fs, double epsilon) { return fs.infer(epsilon); }

namespace detail {

inline std::vector<LabeledSet> uniform_partition(const std::vector<std::string>& labels) {
  const int n = static_cast<int>(labels.size());
  const int half = n / 2;
  std::vector<LabeledSet> sets;
  sets.reserve(labels.size());
  for (int i = 0; i < n; ++i) {
    // Peaks at (i - half)/half; feet on the adjacent peaks; outermost sets
    // become shoulders by reusing their own peak as the outer foot.
    const auto peak_at = [half](int j) { return static_cast<double>(j - half) / half; };
    const double peak = peak_at(i);
    const double left = i > 0 ? peak_at(i - 1) : peak;
    const double right = i < n - 1 ? peak_at(i + 1) : peak;
    sets.push_back({labels[i], MembershipFunction(left, peak, right)});
  }
  return sets;
}

}  // namespace detail

/// Canonical inference systems psi_1, psi_2, psi_3 used as the observer
/// switching functions. psi_1 partitions [-1, 1] into 5 sets, psi_2 and psi_3
/// into 7; all use the identity rule base, unit input scale and the default
/// 1001-point defuzzification grid.
inline FuzzySystem build_standard_psi(int index) {
  if (index < 1 || index > 3) {
    throw std::invalid_argument("build_standard_psi: index must be 1, 2 or 3");
  }
  const std::vector<std::string> labels =
      index == 1 ? std::vector<std::string>{"NB", "NS", "ZR", "PS", "PB"}
                 : std::vector<std::string>{"NBB", "NB", "NS", "ZR", "PS", "PB", "PBB"};
  auto sets = detail::uniform_partition(labels);
  std::vector<FuzzyRule> rules;
  rules.reserve(labels.size());
  for (const auto& label : labels) rules.push_back({label, label});
  return FuzzySystem(sets, sets, std::move(rules));
}

}  // namespace fasmo
