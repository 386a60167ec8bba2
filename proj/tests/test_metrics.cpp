#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "fasmo/metrics.hpp"
#include "fasmo/presets.hpp"

using fasmo::chattering_index;
using fasmo::convergence_time;
using fasmo::rmse;

TEST_CASE("rmse", "[metrics]") {
  CHECK(rmse(std::vector<double>{0, 0, 0, 0}) == 0.0);
  CHECK(rmse(std::vector<double>{0.3, 0.3, 0.3}) == Catch::Approx(0.3));
  CHECK(rmse(std::vector<double>{1, -1, 1, -1}) == Catch::Approx(1.0));
  CHECK_THROWS_AS(rmse(std::vector<double>{}), std::invalid_argument);

  SECTION("invariant under sample reordering") {
    std::vector<double> v{0.1, -0.4, 0.25, 0.0, 0.9};
    const double before = rmse(v);
    std::reverse(v.begin(), v.end());
    CHECK(rmse(v) == Catch::Approx(before));
  }
}

TEST_CASE("chattering index", "[metrics]") {
  SECTION("identical signals have zero excess variation") {
    const std::vector<double> x{0.0, 0.1, 0.3, 0.2, 0.5};
    CHECK(chattering_index(x, x) == 0.0);
  }

  SECTION("alternating spikes give 2aN / TV(truth)") {
    const int n = 1000;
    const double slope = 1e-3, a = 0.5;
    std::vector<double> truth(n), est(n);
    for (int k = 0; k < n; ++k) {
      truth[k] = slope * k;
      est[k] = truth[k] + (k % 2 == 0 ? a : -a);
    }
    const double tv_truth = slope * (n - 1);
    const double expected = 2.0 * a * (n - 1) / tv_truth;
    CHECK(chattering_index(est, truth) == Catch::Approx(expected).epsilon(1e-6));
  }

  SECTION("smoother estimates clip at zero") {
    const std::vector<double> truth{0, 1, 0, 1, 0};
    const std::vector<double> est{0.5, 0.5, 0.5, 0.5, 0.5};
    CHECK(chattering_index(est, truth) == 0.0);
  }

  SECTION("offset and positive scaling invariance") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> truth(200), est(200);
    for (int k = 0; k < 200; ++k) {
      truth[k] = std::sin(0.1 * k);
      est[k] = truth[k] + 0.05 * u(rng);
    }
    const double base = chattering_index(est, truth);
    std::vector<double> est_off(est), truth_off(truth);
    for (int k = 0; k < 200; ++k) {
      est_off[k] += 3.7;
      truth_off[k] += 3.7;
    }
    CHECK(chattering_index(est_off, truth_off) == Catch::Approx(base));
    std::vector<double> est_sc(est), truth_sc(truth);
    for (int k = 0; k < 200; ++k) {
      est_sc[k] *= 2.5;
      truth_sc[k] *= 2.5;
    }
    CHECK(chattering_index(est_sc, truth_sc) == Catch::Approx(base));
  }

  SECTION("order sensitivity: sorting the estimate removes chattering") {
    std::vector<double> truth(100), est(100);
    for (int k = 0; k < 100; ++k) {
      truth[k] = 0.01 * k;
      est[k] = truth[k] + (k % 2 == 0 ? 0.1 : -0.1);
    }
    const double chattering = chattering_index(est, truth);
    std::vector<double> sorted(est);
    std::sort(sorted.begin(), sorted.end());
    CHECK(chattering_index(sorted, truth) < chattering);
  }

  SECTION("misaligned windows are rejected") {
    CHECK_THROWS_AS(chattering_index(std::vector<double>{1, 2}, std::vector<double>{1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(chattering_index(std::vector<double>{}, std::vector<double>{}),
                    std::invalid_argument);
  }
}

TEST_CASE("convergence time", "[metrics]") {
  const std::vector<double> times{0, 1, 2, 3, 4};

  SECTION("all-zero errors converge at t = 0") {
    const std::vector<double> e{0, 0, 0, 0, 0};
    CHECK(convergence_time(times, e, 0.05).value() == 0.0);
  }

  SECTION("monotone decay converges at the first crossing") {
    const std::vector<double> e{1.0, 0.5, 0.04, 0.03, 0.01};
    CHECK(convergence_time(times, e, 0.05).value() == 2.0);
  }

  SECTION("persistently large errors never converge") {
    const std::vector<double> e{1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK_FALSE(convergence_time(times, e, 0.05).has_value());
  }

  SECTION("a late excursion moves the convergence time") {
    const std::vector<double> e{0.01, 0.01, 0.2, 0.01, 0.01};
    CHECK(convergence_time(times, e, 0.05).value() == 3.0);
  }
}

TEST_CASE("tail loss and full reports", "[metrics]") {
  fasmo::Scenario sc = fasmo::scenario_preset("fig3-fuzzy-1e3");
  sc.horizon = 2.0;
  const fasmo::SimulationTrace trace = fasmo::run(sc);

  SECTION("tail mean over a constant tail is that constant") {
    fasmo::SimulationTrace t = trace;
    std::fill(t.loss.begin(), t.loss.end(), 0.25);
    CHECK(fasmo::tail_loss(t, 1.0) == Catch::Approx(0.25));
    std::fill(t.loss.begin(), t.loss.end(), 0.0);
    CHECK(fasmo::tail_loss(t, 1.0) == 0.0);
  }

  SECTION("linear loss over the tail averages to half its peak") {
    fasmo::SimulationTrace t = trace;
    const double t_end = t.times.back();
    for (std::size_t k = 0; k < t.rows(); ++k) {
      t.loss[k] = std::max(0.0, t.times[k] - (t_end - 1.0));
    }
    CHECK(fasmo::tail_loss(t, 1.0) == Catch::Approx(0.5).margin(2e-3));
  }

  SECTION("tail longer than the trace is rejected") {
    CHECK_THROWS_AS(fasmo::tail_loss(trace, 50.0), std::invalid_argument);
  }

  SECTION("compute_metrics fills every channel") {
    const auto report = fasmo::compute_metrics(trace, fasmo::MetricsOptions{1.0, {}, 0.05, 0.5});
    REQUIRE(report.channels.size() == 4);
    for (const auto& ch : report.channels) {
      CHECK(ch.rmse >= 0.0);
      CHECK(ch.max_abs >= ch.rmse);
      CHECK(ch.chattering >= 0.0);
    }
    CHECK_FALSE(report.final_gamma.has_value());
    CHECK(report.tail_loss >= 0.0);
  }

  SECTION("an empty metrics window is rejected") {
    CHECK_THROWS_AS(fasmo::compute_metrics(trace, fasmo::MetricsOptions{100.0, {}, 0.05, 0.5}),
                    std::invalid_argument);
  }
}
