#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "fasmo/fuzzy.hpp"

using fasmo::build_standard_psi;
using fasmo::FuzzyRule;
using fasmo::FuzzySystem;
using fasmo::LabeledSet;
using fasmo::MembershipFunction;

namespace {

const MembershipFunction* find_set(const std::vector<LabeledSet>& sets, const std::string& label) {
  for (const auto& s : sets) {
    if (s.label == label) return &s.shape;
  }
  return nullptr;
}

// Independent reference centroid: dense uniform grid, plain forward
// accumulation, activations recomputed from the system's raw sets. Kept free
// of the production pairwise accumulation on purpose.
double reference_centroid(const FuzzySystem& fs, double eps, int points = 100001) {
  const double scaled = std::clamp(eps / fs.input_scale(), -1.0, 1.0);
  std::vector<std::pair<double, const MembershipFunction*>> clipped;
  for (const auto& rule : fs.rules()) {
    const MembershipFunction* in = find_set(fs.input_sets(), rule.antecedent);
    const MembershipFunction* out = find_set(fs.output_sets(), rule.consequent);
    REQUIRE(in != nullptr);
    REQUIRE(out != nullptr);
    clipped.emplace_back(in->evaluate(scaled), out);
  }
  double num = 0.0, den = 0.0;
  for (int k = 0; k < points; ++k) {
    const double x = -1.0 + 2.0 * k / (points - 1);
    double agg = 0.0;
    for (const auto& [act, out] : clipped) {
      agg = std::max(agg, std::min(act, out->evaluate(x)));
    }
    num += x * agg;
    den += agg;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

TEST_CASE("triangular membership evaluation", "[fuzzy]") {
  const MembershipFunction mf(-0.5, 0.0, 0.5);

  SECTION("peak, interpolation midpoint, outside support") {
    CHECK(mf.evaluate(0.0) == 1.0);
    CHECK(mf.evaluate(0.25) == Catch::Approx(0.5));
    CHECK(mf.evaluate(0.75) == 0.0);
    CHECK(mf.evaluate(-0.5) == 0.0);
  }

  SECTION("shoulder plateaus evaluate to 1") {
    const MembershipFunction left(-1.0, -1.0, -0.5);
    CHECK(left.evaluate(-1.0) == 1.0);
    CHECK(left.evaluate(-0.75) == Catch::Approx(0.5));
    const MembershipFunction right(0.5, 1.0, 1.0);
    CHECK(right.evaluate(1.0) == 1.0);
  }

  SECTION("breakpoint ordering is enforced at construction") {
    CHECK_THROWS_AS(MembershipFunction(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MembershipFunction(-1.0, 0.5, 0.0), std::invalid_argument);
  }
}

TEST_CASE("standard psi structure", "[fuzzy]") {
  const FuzzySystem psi1 = build_standard_psi(1);
  const FuzzySystem psi2 = build_standard_psi(2);
  const FuzzySystem psi3 = build_standard_psi(3);

  CHECK(psi1.input_sets().size() == 5);
  CHECK(psi1.rules().size() == 5);
  CHECK(psi2.input_sets().size() == 7);
  CHECK(psi2.rules().size() == 7);

  SECTION("psi3 is structurally identical to psi2") {
    REQUIRE(psi3.input_sets().size() == psi2.input_sets().size());
    for (std::size_t i = 0; i < psi2.input_sets().size(); ++i) {
      CHECK(psi3.input_sets()[i].label == psi2.input_sets()[i].label);
      CHECK(psi3.input_sets()[i].shape.peak() == psi2.input_sets()[i].shape.peak());
    }
  }

  SECTION("labels include the symmetric big sets") {
    CHECK(find_set(psi1.input_sets(), "PB") != nullptr);
    CHECK(find_set(psi2.input_sets(), "NBB") != nullptr);
    CHECK(find_set(psi2.input_sets(), "PBB") != nullptr);
  }

  CHECK_THROWS_AS(build_standard_psi(0), std::invalid_argument);
  CHECK_THROWS_AS(build_standard_psi(4), std::invalid_argument);
}

TEST_CASE("inference at zero and odd symmetry", "[fuzzy]") {
  for (int idx : {1, 2, 3}) {
    const FuzzySystem psi = build_standard_psi(idx);
    CHECK(psi.infer(0.0) == 0.0);
    for (int k = 0; k <= 400; ++k) {
      const double x = -1.0 + 2.0 * k / 400.0;
      const double pos = psi.infer(x);
      const double neg = psi.infer(-x);
      // exact mirror, not just within tolerance
      CHECK(neg == -pos);
      CHECK(std::abs(pos + neg) <= 1e-9);
    }
  }
}

TEST_CASE("inference is bounded and sign-consistent", "[fuzzy]") {
  std::mt19937 rng(20240517);
  std::uniform_real_distribution<double> wide(-5.0, 5.0);
  for (int idx : {1, 2, 3}) {
    const FuzzySystem psi = build_standard_psi(idx);
    for (int k = 0; k < 500; ++k) {
      const double x = wide(rng);
      const double v = psi.infer(x);
      CHECK(std::abs(v) <= 1.0);
      if (std::abs(x) >= 0.05) {
        CHECK(v * x > 0.0);  // sign agreement away from the origin
      }
    }
  }
}

TEST_CASE("inference is monotone and Lipschitz on the sampled grid", "[fuzzy]") {
  constexpr int kGrid = 401;
  constexpr double kStep = 2.0 / (kGrid - 1);
  for (int idx : {1, 2, 3}) {
    const FuzzySystem psi = build_standard_psi(idx);
    double prev = psi.infer(-1.0);
    for (int k = 1; k < kGrid; ++k) {
      const double cur = psi.infer(-1.0 + kStep * k);
      CHECK(cur >= prev);
      CHECK(std::abs(cur - prev) <= 10.0 * kStep);
      prev = cur;
    }
  }
}

TEST_CASE("production centroid matches a dense reference integration", "[fuzzy][oracle]") {
  for (int idx : {1, 2, 3}) {
    const FuzzySystem psi = build_standard_psi(idx);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double x = -1.0 + 2.0 * k / 99.0;
      worst = std::max(worst, std::abs(psi.infer(x) - reference_centroid(psi, x)));
    }
    INFO("psi" << idx << " worst |grid - reference| = " << worst);
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("saturated inference is the clipped boundary-set centroid", "[fuzzy][oracle]") {
  const FuzzySystem psi3 = build_standard_psi(3);
  // At full activation the aggregate is the PBB shoulder alone; its exact
  // centroid over [2/3, 1] is 8/9.
  const double expected = 8.0 / 9.0;
  CHECK(reference_centroid(psi3, 1.0) == Catch::Approx(expected).margin(2e-4));
  CHECK(psi3.infer(1.0) == Catch::Approx(expected).margin(2e-3));
  // inputs beyond the universe clamp to the same value
  CHECK(psi3.infer(7.5) == psi3.infer(1.0));
  CHECK(psi3.infer(-7.5) == -psi3.infer(1.0));
}

TEST_CASE("input scale rescales the argument", "[fuzzy]") {
  const FuzzySystem unit = build_standard_psi(3);
  const FuzzySystem scaled(unit.input_sets(), unit.output_sets(),
                           {unit.rules().begin(), unit.rules().end()}, 2.0);
  for (int k = 0; k <= 100; ++k) {
    const double x = -2.0 + 4.0 * k / 100.0;
    CHECK(scaled.infer(x) == unit.infer(x / 2.0));
  }
}

TEST_CASE("fuzzy system construction rejects malformed layouts", "[fuzzy]") {
  const auto tri = [](const std::string& label, double l, double p, double r) {
    return LabeledSet{label, MembershipFunction(l, p, r)};
  };
  const std::vector<LabeledSet> good{tri("N", -1, -1, 0), tri("Z", -1, 0, 1), tri("P", 0, 1, 1)};
  const std::vector<FuzzyRule> identity{{"N", "N"}, {"Z", "Z"}, {"P", "P"}};

  SECTION("well-formed system constructs") { CHECK_NOTHROW(FuzzySystem(good, good, identity)); }

  SECTION("coverage gap is rejected") {
    const std::vector<LabeledSet> gappy{tri("N", -1, -1, -0.6), tri("P", 0.6, 1, 1)};
    CHECK_THROWS_WITH(FuzzySystem(gappy, gappy, {{"N", "N"}, {"P", "P"}}),
                      Catch::Matchers::ContainsSubstring("coverage gap"));
  }

  SECTION("asymmetric layout is rejected") {
    const std::vector<LabeledSet> skewed{tri("N", -1, -1, 0.2), tri("Z", -1, 0, 1),
                                         tri("P", 0, 1, 1)};
    CHECK_THROWS_WITH(FuzzySystem(skewed, skewed, identity),
                      Catch::Matchers::ContainsSubstring("mirrored partner"));
  }

  SECTION("rule naming a missing label is rejected") {
    CHECK_THROWS_WITH(FuzzySystem(good, good, {{"N", "N"}, {"Z", "Q"}, {"P", "P"}}),
                      Catch::Matchers::ContainsSubstring("'Q'"));
  }

  SECTION("asymmetric rule base is rejected") {
    CHECK_THROWS_WITH(FuzzySystem(good, good, {{"N", "N"}, {"Z", "Z"}, {"P", "Z"}}),
                      Catch::Matchers::ContainsSubstring("mirror"));
  }

  SECTION("even or tiny defuzzification grids are rejected") {
    CHECK_THROWS_AS(FuzzySystem(good, good, identity, 1.0, 1000), std::invalid_argument);
    CHECK_THROWS_AS(FuzzySystem(good, good, identity, 1.0, 1), std::invalid_argument);
  }

  SECTION("non-positive input scale is rejected") {
    CHECK_THROWS_AS(FuzzySystem(good, good, identity, 0.0), std::invalid_argument);
  }
}
