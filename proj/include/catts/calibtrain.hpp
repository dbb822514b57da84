// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Desk-scale confidence-driven GRPO.
//
// Synthetic QA tasks carry two redundant salient "views" of the answer plus
// a nuisance coordinate. Clear tasks show both views near the answer's
// centre; ambiguous tasks show unrelated views. Corruption adds seeded noise
// to the salient views only. A tabular softmax policy maps
// (view-mean bin, view-disagreement bin) buckets to answer logits. Its
// initial state is perceptually blunt and overconfident: every bucket
// prefers the answer its mean bin points at, with the same certainty,
// whatever the disagreement.

#include <cstdint>
#include <span>
#include <vector>

#include "catts/metrics.hpp"
#include "catts/parallel.hpp"
#include "catts/reward.hpp"

namespace catts::calib {

struct TaskConfig {
  std::size_t num_tasks = 400;
  int answers = 4;
  double clear_fraction = 0.6;
  double clear_jitter = 0.02;
  double noise_sigma = 0.25;
  std::vector<double> disagreement_edges{0.08, 0.25, 0.5};
};

struct SyntheticTask {
  std::vector<double> features;  // [view0, view1, nuisance]
  std::vector<double> noised;    // differs only on the salient views
  int answer = 0;
  int answers = 4;
};

inline constexpr std::size_t kSalientViews = 2;

std::vector<SyntheticTask> make_tasks(const TaskConfig& config, std::uint64_t seed);

class TabularPolicy {
 public:
  TabularPolicy(const TaskConfig& tasks, double temperature);

  /// The blunt, overconfident starting point: in every bucket the answer
  /// indicated by the mean bin has probability `certainty`.
  static TabularPolicy overconfident(const TaskConfig& tasks, double temperature, double certainty);

  std::size_t buckets() const noexcept { return buckets_; }
  int answers() const noexcept { return answers_; }
  double temperature() const noexcept { return temperature_; }

  std::size_t bucket_of(std::span<const double> features) const;

  double& logit(std::size_t bucket, int answer) { return logits_[bucket * answers_ + answer]; }
  double logit(std::size_t bucket, int answer) const { return logits_[bucket * answers_ + answer]; }
  std::span<double> parameters() noexcept { return logits_; }
  std::span<const double> parameters() const noexcept { return logits_; }

  /// softmax(logits / T); one-hot on the first maximum when T = 0.
  std::vector<double> probs(std::size_t bucket) const;

  bool operator==(const TabularPolicy&) const = default;

 private:
  int answers_;
  std::size_t mean_bins_;
  std::vector<double> edges_;
  std::size_t buckets_;
  double temperature_;
  std::vector<double> logits_;
};

/// One original/noised rollout pair: sampled answers and the probability the
/// policy gave each (the certainty).
struct Rollout {
  int answer;
  int noised_answer;
  double s_orig;
  double s_noised;
};

std::vector<Rollout> rollout_group(const TabularPolicy& policy, const SyntheticTask& task,
                                   std::size_t k, std::uint64_t seed, Exec exec = Exec::Serial);

enum class RewardMode { Full, OutputOnly };

/// Rewards for a group through the reward module, advantages included.
std::vector<RewardBreakdown> score_group(const SyntheticTask& task, std::span<const Rollout> group,
                                         const RewardParams& params, RewardMode mode);

/// A scored group: the task's original-image bucket, the sampled answers and
/// their advantages. Only original-image rollouts carry gradient.
struct GroupSample {
  std::size_t bucket;
  std::vector<int> answers;
  std::vector<double> advantages;
};

/// Mean over groups of [(1/k) Σ_j A_j log π(o_j | b) − β_kl · KL(π(·|b) ‖ π_ref(·|b))].
double surrogate(const TabularPolicy& policy, const TabularPolicy& reference,
                 std::span<const GroupSample> batch, double beta_kl);

/// Analytic gradient of `surrogate` with respect to every logit.
std::vector<double> surrogate_gradient(const TabularPolicy& policy, const TabularPolicy& reference,
                                       std::span<const GroupSample> batch, double beta_kl);

struct StepDiagnostics {
  double mean_reward = 0.0;
  double kl = 0.0;
  double objective = 0.0;
};

/// One ascent step along the surrogate gradient. The reference is read only.
StepDiagnostics train_step(TabularPolicy& policy, const TabularPolicy& reference,
                           std::span<const GroupSample> batch, double mean_reward, double beta_kl,
                           double learning_rate);

/// Mean KL(π(·|b) ‖ π_ref(·|b)) over the buckets visited by `tasks`.
double mean_kl(const TabularPolicy& policy, const TabularPolicy& reference,
               std::span<const SyntheticTask> tasks);

struct Evaluation {
  std::vector<OutcomeRecord> origin;
  std::vector<OutcomeRecord> noised;
};

/// Greedy answer and its probability on every task, clean and corrupted.
Evaluation evaluate(const TabularPolicy& policy, std::span<const SyntheticTask> tasks);

struct DemoConfig {
  TaskConfig tasks;
  double init_certainty = 0.95;
  double temperature = 1.0;
  std::size_t steps = 400;
  std::size_t batch = 16;
  std::size_t group = 8;
  double learning_rate = 5.0;
  double beta_kl = 0.01;
  RewardParams reward;
  RewardMode mode = RewardMode::Full;
  std::size_t ece_bins = 10;
  std::size_t eval_every = 10;
};

struct CurvePoint {
  std::size_t step;
  double mean_reward;
  double ece;
  double cd;
  double accuracy;
};

struct DemoResult {
  CalibrationReport before;
  CalibrationReport after;
  std::vector<CurvePoint> curve;
};

CalibrationReport report_for(const Evaluation& eval, std::size_t bins);

DemoResult run_demo(const DemoConfig& config, std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace catts::calib
