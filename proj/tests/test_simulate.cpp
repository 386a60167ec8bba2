#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "fasmo/comparison.hpp"
#include "fasmo/presets.hpp"
#include "fasmo/simulate.hpp"

using fasmo::bitwise_equal;
using fasmo::ObserverInit;
using fasmo::ObserverVariant;
using fasmo::PhiMap;
using fasmo::run;
using fasmo::run_comparison;
using fasmo::Scenario;
using fasmo::scenario_preset;
using fasmo::Signal;
using fasmo::SimulationTrace;
using fasmo::SwitchFunction;
using fasmo::TriangularSystem;

namespace {

// fig3 scenario with a short horizon; cheap enough for bitwise sweeps
Scenario short_preset(const char* name, double horizon) {
  Scenario sc = scenario_preset(name);
  sc.horizon = horizon;
  return sc;
}

}  // namespace

TEST_CASE("degenerate horizon records exactly two samples", "[simulate]") {
  Scenario sc = short_preset("fig3-sign-1e3", 1e-3);
  const SimulationTrace trace = run(sc);
  REQUIRE(trace.rows() == 2);
  CHECK(trace.times[0] == 0.0);
  CHECK(trace.times[1] == Catch::Approx(1e-3));
}

TEST_CASE("perfect start keeps every error channel at exact zero", "[simulate]") {
  // Constant-velocity integrator chain with consistent internal states: the
  // error dynamics sit on their exact fixed point, including for the fuzzy
  // variant (the centroid of a symmetric aggregate is exactly zero).
  TriangularSystem chain(3, {PhiMap{}, PhiMap{}}, Signal::zero());
  Scenario sc{std::move(chain),
              fasmo::reference_observer(ObserverVariant::Fuzzy, 3),
              {1.0, 0.5, 0.0},
              ObserverInit{{1.0, 0.5, 0.0}, {0.5, 0.0, 0.0}},
              1e-3,
              1.0,
              1};
  const SimulationTrace trace = run(sc);
  for (int i = 0; i < 3; ++i) {
    for (double e : trace.eps[i]) CHECK(e == 0.0);
  }
  // estimates track the true states exactly as well
  for (std::size_t k = 0; k < trace.rows(); ++k) {
    CHECK(trace.z_hat[0][k] == trace.z[0][k]);
  }
  for (double g : trace.gates[0]) CHECK(g == 1.0);
  for (double l : trace.loss) CHECK(l == 0.0);
}

TEST_CASE("traces are deterministic and stride-consistent", "[simulate]") {
  SECTION("identical scenarios give bit-identical traces") {
    const Scenario sc = short_preset("fig3-fuzzy-1e3", 1.0);
    CHECK(bitwise_equal(run(sc), run(sc)));
  }

  SECTION("a strided trace is the exact subsample of the dense one") {
    Scenario dense = short_preset("fig3-fuzzy-1e3", 1.0);
    Scenario strided = dense;
    strided.record_stride = 5;
    const SimulationTrace a = run(dense);
    const SimulationTrace b = run(strided);
    REQUIRE(b.rows() == (a.rows() - 1) / 5 + 1);
    for (std::size_t k = 0; k < b.rows(); ++k) {
      CHECK(b.times[k] == a.times[5 * k]);
      for (int i = 0; i < a.channels; ++i) {
        CHECK(b.z_hat[i][k] == a.z_hat[i][5 * k]);
        CHECK(b.eps[i][k] == a.eps[i][5 * k]);
      }
      CHECK(b.loss[k] == a.loss[5 * k]);
    }
  }
}

TEST_CASE("variant degeneracies hold bitwise over whole runs", "[simulate]") {
  SECTION("adaptive with zero learning rate equals the fuzzy run") {
    const Scenario fuzzy = short_preset("fig3-fuzzy-1e3", 2.0);
    Scenario frozen = fuzzy;
    frozen.observer.variant = ObserverVariant::Adaptive;
    frozen.observer.learning_rate = 0.0;
    frozen.observer.gamma0 = 0.5;
    const SimulationTrace a = run(fuzzy);
    const SimulationTrace b = run(frozen);
    CHECK(bitwise_equal(a, b));  // twins run but never touch the nominal path
    CHECK(b.adaptive);
    for (double g : b.gamma) CHECK(g == 0.5);
  }

  SECTION("fuzzy with sign switches equals the sign run") {
    const Scenario sign_sc = short_preset("fig3-sign-1e3", 2.0);
    Scenario masked = sign_sc;
    masked.observer.variant = ObserverVariant::Fuzzy;
    masked.observer.switches.assign(4, SwitchFunction::sign());
    CHECK(bitwise_equal(run(sign_sc), run(masked)));
  }
}

TEST_CASE("adaptive exponent stays inside its bounds", "[simulate][property]") {
  Scenario sc = short_preset("fig4-adaptive", 3.0);
  sc.observer.learning_rate = 50.0;  // large enough to slam into the clamps
  const SimulationTrace trace = run(sc);
  double lo = 1.0, hi = 0.0;
  for (double g : trace.gamma) {
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  INFO("gamma range [" << lo << ", " << hi << "]");
  CHECK(lo >= sc.observer.gamma_min);
  CHECK(hi <= sc.observer.gamma_max);
  CHECK(lo == sc.observer.gamma_min);  // the clamp actually engaged
}

TEST_CASE("run_comparison shares the plant and attaches metrics", "[simulate]") {
  SECTION("fewer than two scenarios are rejected") {
    const std::vector<Scenario> one{short_preset("fig3-sign-1e3", 1.0)};
    CHECK_THROWS_AS(run_comparison(one), std::invalid_argument);
  }

  SECTION("shared plant columns are the same samples") {
    std::vector<Scenario> pair{short_preset("fig3-sign-1e3", 1.0),
                               short_preset("fig3-fuzzy-1e3", 1.0)};
    const auto results = run_comparison(pair, fasmo::MetricsOptions{0.0, {}, 0.05, 0.5});
    REQUIRE(results.size() == 2);
    CHECK(results[0].trace.z == results[1].trace.z);
    CHECK(results[0].metrics.channels.size() == 4);
  }

  SECTION("a scenario compared with itself is identical") {
    std::vector<Scenario> twice{short_preset("fig3-fuzzy-1e3", 1.0),
                                short_preset("fig3-fuzzy-1e3", 1.0)};
    const auto results = run_comparison(twice, fasmo::MetricsOptions{0.0, {}, 0.05, 0.5});
    CHECK(bitwise_equal(results[0].trace, results[1].trace));
  }
}

TEST_CASE("non-finite states abort with the offending time", "[simulate]") {
  TriangularSystem unstable(2, {fasmo::polynomial_phi({{1.0, {3}}})}, Signal::zero());
  Scenario sc{std::move(unstable),
              fasmo::reference_observer(ObserverVariant::Sign, 2),
              {50.0, 0.0},
              ObserverInit{{0.0, 0.0}, {0.0, 0.0}},
              1.0,
              50.0,
              1};
  CHECK_THROWS_WITH(run(sc), Catch::Matchers::ContainsSubstring("t = "));
}
