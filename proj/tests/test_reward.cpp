// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include <cmath>
#include <numeric>
#include <random>

#include "catts/error.hpp"
#include "catts/reward.hpp"
#include "doctest.h"

using namespace catts;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::Io;
}

}  // namespace

TEST_CASE("r_output examples") {
  CHECK(r_output("The answer is 6", "6") == 1);
  CHECK(r_output("B", "B") == 1);
  CHECK(r_output("4", "6") == 0);
  CHECK(r_output("  the   ANSWER\tis   Paris ", "answer is paris") == 1);
  CHECK(code_of([] { r_output("x", "  "); }) == Errc::EmptyGroundTruth);
}

TEST_CASE("r_format examples") {
  const FormatSpec spec;
  CHECK(r_format("...reasoning... Answer: B", spec) == 1);
  CHECK(r_format("Step one.\nStep two.\nAnswer: 42\n", spec) == 1);
  CHECK(r_format("", spec) == 0);
  CHECK(r_format("Answer: A\nAnswer: B", spec) == 0);
  CHECK(r_format("Answer: A\nbut then I kept talking", spec) == 0);
  CHECK(r_format("no envelope here", spec) == 0);
  CHECK(code_of([] { FormatSpec bad("(unclosed"); }) == Errc::BadPattern);
  const FormatSpec boxed(R"(\\boxed\{([^}]*)\})");
  CHECK(r_format("so \\boxed{7}", boxed) == 1);
}

TEST_CASE("r_conf examples") {
  CHECK(r_conf(1.0, 1.0, 1, 0.5, 5.0) == doctest::Approx(1.0));
  CHECK(r_conf(1.0, 1.0, 0, 0.5, 5.0) == doctest::Approx(-1.0));
  CHECK(r_conf(0.8, 0.6, 1, 0.5, 5.0) == doctest::Approx(1.180797).epsilon(1e-6));
  CHECK(code_of([] { r_conf(0.8, 0.6, 1, 0.0, 5.0); }) == Errc::BadHyper);
  CHECK(code_of([] { r_conf(0.8, 0.6, 1, 0.5, -1.0); }) == Errc::BadHyper);
  CHECK(code_of([] { r_conf(0.0, 0.6, 1, 0.5, 5.0); }) == Errc::OutOfRange);
}

TEST_CASE("total_reward examples") {
  CHECK(total_reward(1.18, 1, 1) == doctest::Approx(3.18));
  CHECK(total_reward(0.0, 0, 0) == 0.0);
  CHECK(total_reward(-1.0, 0, 1) == 0.0);
  const RewardBreakdown b = score_rollout(0.8, 0.6, 1, 1, RewardParams{});
  CHECK(b.total == b.r_conf + b.r_output + b.r_format);
  CHECK_FALSE(b.advantage.has_value());
}

TEST_CASE("group_advantage examples") {
  const std::vector<double> flat{1, 1, 1, 1};
  CHECK(group_advantage(flat, 1e-6) == std::vector<double>(4, 0.0));
  const std::vector<double> flat_inexact{0.1, 0.1, 0.1};
  CHECK(group_advantage(flat_inexact, 0.0) == std::vector<double>(3, 0.0));
  const std::vector<double> two{0, 2};
  const auto a = group_advantage(two, 0.0);
  CHECK(a[0] == doctest::Approx(-1.0));
  CHECK(a[1] == doctest::Approx(1.0));
  const std::vector<double> three{1, 2, 3};
  const auto b = group_advantage(three, 0.0);
  CHECK(b[0] == doctest::Approx(-1.224745).epsilon(1e-6));
  CHECK(b[1] == doctest::Approx(0.0));
  CHECK(b[2] == doctest::Approx(1.224745).epsilon(1e-6));
  const std::vector<double> single{3.5};
  CHECK(group_advantage(single, 1e-6)[0] == 0.0);

  std::vector<RewardBreakdown> group(2);
  group[0].total = 0.0;
  group[1].total = 2.0;
  assign_advantages(group, 0.0);
  CHECK(*group[1].advantage == doctest::Approx(1.0));
}

TEST_CASE("kl_divergence examples") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75}, point{1.0, 0.0}, half{0.5, 0.5};
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(p, q) == doctest::Approx(0.143841).epsilon(1e-6));
  CHECK(kl_divergence(point, half) == doctest::Approx(std::log(2.0)));
  const std::vector<double> three{0.2, 0.3, 0.5};
  CHECK(code_of([&] { kl_divergence(p, three); }) == Errc::SupportMismatch);
  CHECK(code_of([&] { kl_divergence(half, point); }) == Errc::AbsoluteContinuityViolation);
}

TEST_CASE("grpo_objective examples") {
  CHECK(grpo_objective(1.0, 0.0, 0.1) == 1.0);
  CHECK(grpo_objective(0.5, 0.2, 0.1) == doctest::Approx(0.48));
  CHECK(grpo_objective(0.7, 3.0, 0.0) == 0.7);
  CHECK_THROWS_AS(grpo_objective(0.7, -1.0, 0.1), Error);
}

TEST_CASE("property: perception and calibration term bounds") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> s(1e-6, 1.0), a(0.01, 3.0), b(0.01, 20.0);
  for (int i = 0; i < 5000; ++i) {
    const double alpha = a(rng), beta = b(rng);
    const double d1 = s(rng) - s(rng), d2 = s(rng) - s(rng);
    CHECK(std::abs(perception_term(d1, alpha, beta)) <= alpha);
    CHECK(perception_term(-d1, alpha, beta) == doctest::Approx(-perception_term(d1, alpha, beta)));
    if (d1 < d2) CHECK(perception_term(d1, alpha, beta) <= perception_term(d2, alpha, beta));
    const double so = s(rng);
    CHECK(std::abs(calibration_term(so, 1)) <= 1.0);
    CHECK(calibration_term(so, 0) == -calibration_term(so, 1));
  }
}

TEST_CASE("property: group advantages are standardized") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> r(-3.0, 3.0);
  std::uniform_int_distribution<int> size(2, 16);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> rewards(static_cast<std::size_t>(size(rng)));
    for (double& x : rewards) x = r(rng);
    const auto adv = group_advantage(rewards, 0.0);
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
    double var = 0.0;
    for (double x : adv) var += (x - mean) * (x - mean);
    CHECK(std::abs(mean) <= 1e-12);
    CHECK(std::sqrt(var / adv.size()) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("property: KL is non-negative and zero only at equality") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> p(4), q(4);
    double sp = 0, sq = 0;
    for (int j = 0; j < 4; ++j) {
      p[j] = u(rng);
      q[j] = u(rng);
      sp += p[j];
      sq += q[j];
    }
    for (int j = 0; j < 4; ++j) {
      p[j] /= sp;
      q[j] /= sq;
    }
    CHECK(kl_divergence(p, q) > 0.0);
    CHECK(kl_divergence(p, p) <= 1e-12);
  }
}
