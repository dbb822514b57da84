// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

#include "catts/answer.hpp"
#include "catts/confidence.hpp"
#include "catts/expert.hpp"

namespace catts {

struct RunConfig {
  // sampling
  std::size_t n = 8;
  double temperature = 1.0;
  int top_k = 40;
  int max_tokens = 1024;
  int logprob_depth = 1;
  Aggregation aggregation = Aggregation::mean();
  std::string answer_pattern{FormatSpec::kDefaultPattern};

  // module weights
  double tau1 = 0.5;
  double tau2 = 0.5;
  double tau3 = 0.5;
  double vcd_alpha = 0.5;
  double vcd_beta = 0.1;
  int expert_retries = 3;
  double expert_temperature = 0.0;

  // switches
  bool enable_planner = true;
  bool enable_consistency = true;
  bool enable_voter = true;
  bool enable_reflection = true;
  bool enable_check = true;
  std::optional<Schedule> schedule;  // fixed order, bypasses the planner
  std::size_t reflection_samples = 1;
  std::optional<double> reflection_gate;  // reflect only below this certainty

  // self-check image construction when a record has no noised image
  double noise_sigma = 64.0;

  // rewards
  double reward_alpha = 0.5;
  double reward_beta = 5.0;

  // evaluation
  std::size_t ece_bins = 10;
  double filter_keep = 0.5;  // certainty-filtered baseline keeps this fraction

  // infrastructure
  std::string backend;
  std::string expert_backend;  // empty: the base backend
  std::string prompts_dir;     // empty: bundled prompts
  std::uint64_t seed = 0;
  std::size_t max_inflight = 8;
  bool record_timings = false;
};

/// Unknown keys and out-of-range values throw Config.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& config);
/// Relative sim: scenario paths and prompts_dir resolve against the
/// config file's directory.
RunConfig load_config(const std::filesystem::path& path);
void validate(const RunConfig& config);

std::string to_string(const Schedule& schedule);

}  // namespace catts
