// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include <cmath>
#include <random>

#include "catts/error.hpp"
#include "catts/metrics.hpp"
#include "doctest.h"

using namespace catts;

namespace {

std::vector<OutcomeRecord> records(std::initializer_list<std::pair<double, bool>> items) {
  std::vector<OutcomeRecord> out;
  for (auto [c, ok] : items) out.push_back({c, ok});
  return out;
}

double brute_auroc(const std::vector<OutcomeRecord>& rs) {
  double wins = 0.0, pairs = 0.0;
  for (const auto& a : rs) {
    if (!a.correct) continue;
    for (const auto& b : rs) {
      if (b.correct) continue;
      pairs += 1.0;
      wins += a.certainty > b.certainty ? 1.0 : (a.certainty == b.certainty ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("ece examples") {
  // Two bins, each with certainty equal to its accuracy.
  const auto perfect = records({{0.5, true}, {0.5, false}, {1.0, true}, {1.0, true}});
  CHECK(ece(perfect) == doctest::Approx(0.0).epsilon(1e-15));
  const auto half = records({{1.0, true}, {1.0, false}});
  CHECK(ece(half) == doctest::Approx(0.5));
  std::vector<OutcomeRecord> ten;
  for (int i = 0; i < 10; ++i) ten.push_back({0.8, i < 6});
  CHECK(ece(ten) == doctest::Approx(0.2));
  CHECK_THROWS_AS(ece(std::vector<OutcomeRecord>{}), Error);
}

TEST_CASE("ece three-bin fixture") {
  // Bins of width 1/3: (0,1/3], (1/3,2/3], (2/3,1].
  //   bin0: {0.2 ✗, 0.3 ✓}      acc 0.5, conf 0.25  → |0.25| · 2/7
  //   bin1: {0.5 ✓, 0.6 ✗, 0.4 ✓} acc 2/3, conf 0.5 → |1/6| · 3/7
  //   bin2: {0.9 ✓, 1.0 ✓}      acc 1,   conf 0.95  → |0.05| · 2/7
  const auto rs = records({{0.2, false}, {0.3, true}, {0.5, true}, {0.6, false}, {0.4, true},
                           {0.9, true}, {1.0, true}});
  const double want = 0.25 * 2 / 7 + (1.0 / 6.0) * 3 / 7 + 0.05 * 2 / 7;
  CHECK(ece(rs, 3) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("auroc examples") {
  CHECK(auroc(records({{0.9, true}, {0.8, true}, {0.2, false}, {0.1, false}})) == 1.0);
  CHECK(auroc(records({{0.5, true}, {0.5, false}, {0.5, true}, {0.5, false}})) == 0.5);
  CHECK(auroc(records({{0.9, true}, {0.4, true}, {0.6, false}})) == 0.5);
  try {
    auroc(records({{0.9, true}, {0.4, true}}));
    FAIL("expected DegenerateClasses");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateClasses);
  }
}

TEST_CASE("property: auroc matches all-pairs brute force and is rank-invariant") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> size(2, 200), level(1, 20);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<OutcomeRecord> rs(static_cast<std::size_t>(size(rng)));
    for (auto& r : rs) r = {level(rng) / 20.0, coin(rng)};
    rs[0].correct = true;
    rs[1].correct = false;
    const double got = auroc(rs);
    CHECK(got == brute_auroc(rs));
    auto squashed = rs;
    for (auto& r : squashed) r.certainty = std::pow(r.certainty, 3.0);
    CHECK(auroc(squashed) == got);
  }
}

TEST_CASE("confidence_drop examples") {
  const auto origin = records({{0.9, true}, {0.7, true}});
  CHECK(confidence_drop(origin, origin) == 0.0);
  const auto lower = records({{0.7, true}, {0.5, false}});
  CHECK(confidence_drop(origin, lower) == doctest::Approx(-0.2));
  const auto higher = records({{0.95, true}, {0.85, true}});
  CHECK(confidence_drop(origin, higher) > 0.0);
  CHECK_THROWS_AS(confidence_drop(origin, std::vector<OutcomeRecord>{}), Error);
}

TEST_CASE("scaling_slope examples") {
  const std::vector<ScalingPoint> line{{1, 10.0}, {2, 13.0}, {4, 16.0}};
  const SlopeFit fit = scaling_slope(line);
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(10.0).epsilon(1e-12));
  const std::vector<ScalingPoint> flat{{1, 50.0}, {8, 50.0}, {32, 50.0}};
  CHECK(scaling_slope(flat).slope == doctest::Approx(0.0));
  const std::vector<ScalingPoint> single{{4, 50.0}, {4, 52.0}};
  try {
    scaling_slope(single);
    FAIL("expected DegenerateDesign");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateDesign);
  }
}

TEST_CASE("property: collinear scaling points recover their slope") {
  std::mt19937_64 rng(30);
  std::uniform_real_distribution<double> slope(-5.0, 5.0), icept(0.0, 80.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double b = slope(rng), a = icept(rng);
    std::vector<ScalingPoint> pts;
    for (int n : {1, 2, 4, 8, 16, 32}) pts.push_back({n, a + b * std::log2(n)});
    const SlopeFit fit = scaling_slope(pts);
    CHECK(std::abs(fit.slope - b) <= 1e-9);
    CHECK(std::abs(fit.intercept - a) <= 1e-9);
  }
}

TEST_CASE("calibration_report omits undefined fields") {
  const auto all_right = records({{0.9, true}, {0.8, true}});
  const CalibrationReport r = calibration_report(all_right, 10);
  CHECK_FALSE(r.auroc.has_value());
  CHECK_FALSE(r.confidence_drop.has_value());
  CHECK(r.accuracy == 1.0);
  const auto origin = records({{1.0, true}});
  CHECK(*calibration_report(all_right, 10, origin).confidence_drop == doctest::Approx(-0.15));
}
