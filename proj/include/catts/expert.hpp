// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Planner, Voter and Critic protocols over an expert backend. Failures never
// abort a run: the planner falls back to the default order, the voter to a
// uniform ballot, and a missing critique skips reflection.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "catts/backend.hpp"
#include "catts/prompts.hpp"
#include "catts/vote.hpp"

namespace catts {

using Schedule = std::vector<ModuleTag>;

inline const Schedule kDefaultSchedule{ModuleTag::Consistency, ModuleTag::Reflection, ModuleTag::Check};

struct ExpertContext {
  std::string question_id;
  std::vector<std::string> images;
  std::string question;
  SamplingParams sampling;  // seed is the base for per-attempt seeds
  int max_retries = 3;
};

/// Accepts the names consistency, reflection and check (optionally with a
/// "self-" prefix, any case) separated by commas, arrows, whitespace or
/// newlines. Anything but each name exactly once is rejected.
std::optional<Schedule> parse_schedule(std::string_view reply);

/// Line-oriented "candidate: value" pairs; several pairs on one line may be
/// separated by commas or semicolons. Bullets, numbering and ** emphasis are
/// stripped; "70%" reads as 0.7. Succeeds only if every candidate appears
/// exactly once, no other name appears, every value lies in [0, 1] and the
/// sum is within 1e-3 of 1. The result is rescaled to sum to 1 and follows
/// the order of `candidates`.
std::optional<std::vector<BallotEntry>> parse_ballot(std::string_view reply,
                                                     const std::vector<std::string>& candidates);

std::vector<BallotEntry> uniform_ballot(const std::vector<std::string>& candidates);

struct PlanOutcome {
  Schedule schedule;
  bool fallback = false;
  int attempts = 0;
  std::vector<std::string> warnings;
};

struct BallotOutcome {
  std::vector<BallotEntry> ballot;
  bool fallback = false;
  int attempts = 0;
  std::vector<std::string> warnings;
};

struct CritiqueOutcome {
  std::string text;
  int attempts = 0;
  std::vector<std::string> warnings;
};

PlanOutcome plan(const Backend& expert, const PromptLibrary& prompts, const ExpertContext& ctx);

BallotOutcome vote(const Backend& expert, const PromptLibrary& prompts, const ExpertContext& ctx,
                   const std::vector<std::string>& candidates);

/// Throws CritiqueUnavailable once every attempt is empty or failed.
CritiqueOutcome critique(const Backend& expert, const PromptLibrary& prompts, const ExpertContext& ctx,
                         const std::string& initial_answer, double initial_certainty);

/// Candidates as rendered into the voter prompt: one "- name" line each.
std::string format_candidates(const std::vector<std::string>& candidates);

}  // namespace catts
