// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// One question through the planner-scheduled modules. The n consistency
// samples are drawn once per question and shared by every module that needs
// them: consistency votes on them, reflection starts from their weighted
// winner, and self-check scores their distinct answers. Each module reads
// only the samples and its own expert calls, never the running tally, so
// the final tally does not depend on the module order.

#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catts/backend.hpp"
#include "catts/config.hpp"
#include "catts/dataset.hpp"
#include "catts/prompts.hpp"
#include "catts/vote.hpp"

namespace catts {

inline constexpr int kTraceSchemaVersion = 1;

struct Backends {
  std::shared_ptr<const Backend> base;
  std::shared_ptr<const Backend> expert;  // may equal base
};

struct SampleRecord {
  std::optional<std::string> answer;
  double nmlp = 0.0;
  double certainty = 0.0;
  bool operator==(const SampleRecord&) const = default;
};

struct ModuleStep {
  ModuleTag module;
  bool ran = false;
  std::string note;                      // why it was skipped, if it was
  std::map<std::string, double> tally;   // snapshot after the step
  double mass = 0.0;
  bool operator==(const ModuleStep&) const = default;
};

struct VcdRecord {
  std::vector<std::string> candidates;
  std::vector<double> orig_logp;
  std::vector<double> noised_logp;
  std::vector<double> contrastive;
  std::vector<bool> plausible;
  std::string answer;
  bool operator==(const VcdRecord&) const = default;
};

struct TraceRecord {
  std::string question_id;
  std::string condition;
  std::vector<std::string> tags;
  Schedule schedule;
  bool planner_fallback = false;
  std::vector<SampleRecord> samples;
  std::vector<std::string> candidates;
  std::vector<BallotEntry> ballot;
  bool ballot_fallback = false;
  std::optional<std::string> initial_answer;
  std::optional<double> initial_certainty;
  std::optional<std::string> critique;
  std::vector<std::string> reflected_answers;
  std::optional<VcdRecord> vcd;
  std::vector<ModuleStep> steps;
  VoteTally tally;
  std::string final_answer;
  double final_certainty = 0.0;  // the final answer's share of tally mass
  std::string ground_truth;
  bool correct = false;
  std::vector<std::string> warnings;
  std::optional<std::string> error;
  std::map<std::string, double> timings_ms;

  /// Mass the tally must hold: 1 for consistency plus τ for every other
  /// contribution that ran.
  double expected_mass(const RunConfig& config) const;
};

nlohmann::json to_json(const TraceRecord& trace);
TraceRecord trace_from_json(const nlohmann::json& doc);

/// Never throws for backend trouble: a hard failure comes back as a trace
/// with `error` set and no final answer.
TraceRecord run_question(const QuestionRecord& record, const RunConfig& config, const Backends& backends,
                         const PromptLibrary& prompts);

/// Seed for everything drawn for one question.
std::uint64_t question_seed(const RunConfig& config, const std::string& question_id);

/// Builds the self-check image for a record without one: seeded saliency
/// noise on a PNM image, cached under the system temp directory. Returns
/// nothing when the record has no readable PNM image.
std::optional<std::string> noised_image_for(const QuestionRecord& record, const RunConfig& config);

}  // namespace catts
