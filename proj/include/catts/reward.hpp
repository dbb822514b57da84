// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Reward stack for confidence-driven GRPO: output and format rewards, the
// confidence-based calibration reward, group-relative advantages, the KL
// penalty and the objective value.
//
// Certainties are on the S = exp(-NMLP) scale, so a confidence drop under
// noise (S_orig > S_noised) earns a positive perception term.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catts/answer.hpp"

namespace catts {

struct RewardParams {
  double alpha = 0.5;     // perception-term amplitude
  double beta = 5.0;      // perception-term slope
  double epsilon = 1e-6;  // advantage denominator guard
};

struct RewardBreakdown {
  double r_conf = 0.0;
  int r_output = 0;
  int r_format = 0;
  double total = 0.0;
  std::optional<double> advantage;
};

/// 1 iff canonical ground truth is a substring of the canonical answer.
int r_output(std::string_view answer, std::string_view ground_truth);

/// 1 iff `text` holds exactly one envelope and it ends the text.
int r_format(const std::string& text, const FormatSpec& spec);

double perception_term(double delta_s, double alpha, double beta);
double calibration_term(double s_orig, int r_out);

/// alpha·tanh(beta·(s_orig − s_noised)) + (2·r_out − 1)·s_orig.
double r_conf(double s_orig, double s_noised, int r_out, double alpha, double beta);

double total_reward(double r_conf, int r_output, int r_format);

/// Fills r_conf and total from the rollout pair's certainties and rewards.
RewardBreakdown score_rollout(double s_orig, double s_noised, int r_out, int r_fmt,
                              const RewardParams& params);

/// (r_j − mean) / (population std + epsilon); all zeros when the group has
/// no spread.
std::vector<double> group_advantage(std::span<const double> rewards, double epsilon);

/// Writes advantages into a completed group of breakdowns.
void assign_advantages(std::span<RewardBreakdown> group, double epsilon);

/// Σ p·ln(p/q), with 0·ln(0/q) = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// group_mean_reward − beta_kl·kl.
double grpo_objective(double group_mean_reward, double kl, double beta_kl);

}  // namespace catts
