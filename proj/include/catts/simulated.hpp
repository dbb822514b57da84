// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Scenario-driven test double.
//
// A scenario is either line-delimited JSON (one entry per line, plus an
// optional {"scenario": {...}} settings line) or one document of the form
// {"scenario": {...}, "entries": [...]}. Each entry is keyed by question id
// and condition:
//
//   {"id": "q1", "condition": "original",
//    "variants": [{"weight": 5, "text": "... Answer: 4", "answer": "4",
//                  "logprobs": [[-0.22], [-0.05, -3.1]]}],
//    "candidate_scores": {"4": -0.9, "6": -0.4}}
//
// Conditions: original, noised, reflected (base model) and planner, voter,
// critic (expert roles). A voter entry may carry "ballot": {candidate: c}
// instead of variants; the reply lists the requested candidates with their
// ballot values rescaled to sum to 1. "token_logprobs": [..] is shorthand
// for depth-1 logprobs. A variant without either scores as one token of
// probability 1. Variant selection is a seeded weighted draw ("weighted") or
// sample_index modulo the variant count ("cycle").

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catts/backend.hpp"

namespace catts {

struct ScenarioVariant {
  double weight = 1.0;
  std::string text;
  std::optional<std::string> answer;
  std::vector<TokenTopK> tokens;
};

struct ScenarioEntry {
  std::string id;
  std::string condition;
  std::string selection;  // empty: scenario default
  std::vector<ScenarioVariant> variants;
  std::map<std::string, double> candidate_scores;
  std::map<std::string, double> ballot;
};

struct Scenario {
  std::string backend_id = "sim";
  std::string selection = "weighted";
  double floor_logprob = -13.815510557964274;  // ln 1e-6
  std::map<std::pair<std::string, std::string>, ScenarioEntry> entries;

  /// Validates and inserts; throws SchemaViolation on a duplicate key.
  void add(ScenarioEntry entry);
};

/// Throws SchemaViolation with "<source>:<line>" diagnostics.
Scenario parse_scenario(std::string_view text, std::string_view source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

class SimulatedBackend final : public Backend {
 public:
  explicit SimulatedBackend(Scenario scenario);
  static std::shared_ptr<SimulatedBackend> load(const std::filesystem::path& path);

  std::string id() const override { return scenario_.backend_id; }
  GenerationResult generate(const GenerationRequest& request) const override;
  std::vector<double> score_candidates(const ScoreRequest& request) const override;

  const Scenario& scenario() const noexcept { return scenario_; }

 private:
  const ScenarioEntry& entry(const RequestRoute& route) const;
  Scenario scenario_;
};

}  // namespace catts
