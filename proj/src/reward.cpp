// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/reward.hpp"

#include <cmath>

#include "catts/error.hpp"

namespace catts {

namespace {

void check_certainty(double s, const char* name) {
  if (!(s > 0.0 && s <= 1.0)) {
    throw Error(Errc::OutOfRange, std::string(name) + " = " + std::to_string(s) +
                                      " is not a certainty in (0, 1]");
  }
}

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw Error(Errc::OutOfRange, std::string(name) + " has a negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(Errc::OutOfRange, std::string(name) + " sums to " + std::to_string(sum));
  }
}

}  // namespace

int r_output(std::string_view answer, std::string_view ground_truth) {
  const std::string gt = canonicalize(ground_truth);
  if (gt.empty()) throw Error(Errc::EmptyGroundTruth, "ground truth is empty");
  return canonicalize(answer).find(gt) != std::string::npos ? 1 : 0;
}

int r_format(const std::string& text, const FormatSpec& spec) {
  auto it = std::sregex_iterator(text.begin(), text.end(), spec.regex());
  const auto end = std::sregex_iterator();
  if (it == end) return 0;
  const std::smatch first = *it;
  if (++it != end) return 0;
  const auto tail = static_cast<std::size_t>(first.position(0) + first.length(0));
  return text.find_first_not_of(" \t\r\n", tail) == std::string::npos ? 1 : 0;
}

double perception_term(double delta_s, double alpha, double beta) {
  return alpha * std::tanh(beta * delta_s);
}

double calibration_term(double s_orig, int r_out) { return (2.0 * r_out - 1.0) * s_orig; }

double r_conf(double s_orig, double s_noised, int r_out, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(Errc::BadHyper, "perception alpha and beta must be positive");
  }
  check_certainty(s_orig, "s_orig");
  check_certainty(s_noised, "s_noised");
  if (r_out != 0 && r_out != 1) throw Error(Errc::OutOfRange, "r_out must be 0 or 1");
  return perception_term(s_orig - s_noised, alpha, beta) + calibration_term(s_orig, r_out);
}

double total_reward(double r_conf, int r_output, int r_format) {
  return r_conf + r_output + r_format;
}

RewardBreakdown score_rollout(double s_orig, double s_noised, int r_out, int r_fmt,
                              const RewardParams& params) {
  RewardBreakdown b;
  b.r_conf = r_conf(s_orig, s_noised, r_out, params.alpha, params.beta);
  b.r_output = r_out;
  b.r_format = r_fmt;
  b.total = total_reward(b.r_conf, b.r_output, b.r_format);
  return b;
}

std::vector<double> group_advantage(std::span<const double> rewards, double epsilon) {
  std::vector<double> out(rewards.size(), 0.0);
  if (rewards.empty()) return out;
  const auto n = static_cast<long double>(rewards.size());
  long double mean = 0.0L;
  for (double r : rewards) mean += r;
  mean /= n;
  long double var = 0.0L;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const long double sd = std::sqrt(var / n);
  // Rounding leaves a residual spread on constant groups; treat it as zero.
  if (sd <= 1e-12L * std::max(1.0L, std::abs(mean))) return out;
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    out[j] = static_cast<double>((rewards[j] - mean) / (sd + epsilon));
  }
  return out;
}

void assign_advantages(std::span<RewardBreakdown> group, double epsilon) {
  std::vector<double> totals;
  totals.reserve(group.size());
  for (const auto& b : group) totals.push_back(b.total);
  const std::vector<double> adv = group_advantage(totals, epsilon);
  for (std::size_t j = 0; j < group.size(); ++j) group[j].advantage = adv[j];
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    throw Error(Errc::SupportMismatch, "distributions have different supports");
  }
  check_distribution(p, "p");
  check_distribution(q, "q");
  // ln(p/q) evaluated as log1p((p − q)/q).
  long double kl = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw Error(Errc::AbsoluteContinuityViolation,
                  "q is zero where p is positive at index " + std::to_string(i));
    }
    const long double pi = p[i];
    const long double qi = q[i];
    kl += pi * std::log1p((pi - qi) / qi);
  }
  return std::max(0.0, static_cast<double>(kl));
}

double grpo_objective(double group_mean_reward, double kl, double beta_kl) {
  if (!(kl >= 0.0)) throw Error(Errc::OutOfRange, "KL divergence must be non-negative");
  return group_mean_reward - beta_kl * kl;
}

}  // namespace catts
