// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// The shared answer -> score dictionary every test-time module writes into.
// Each mutation appends a provenance entry, so per candidate the provenance
// deltas always sum to its score.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace catts {

enum class ModuleTag { Consistency, Expert, Reflection, Check };

std::string_view to_string(ModuleTag tag) noexcept;
ModuleTag parse_module_tag(std::string_view text);

struct ProvenanceEntry {
  ModuleTag tag;
  std::string candidate;
  double delta;

  bool operator==(const ProvenanceEntry&) const = default;
};

class VoteTally {
 public:
  const std::map<std::string, double>& scores() const noexcept { return scores_; }
  const std::vector<ProvenanceEntry>& provenance() const noexcept { return provenance_; }

  bool empty() const noexcept { return scores_.empty(); }
  double score(const std::string& candidate) const;
  double mass() const noexcept;

  /// Number of internal-vote provenance entries for the candidate.
  std::size_t internal_count(const std::string& candidate) const;

  /// scores[candidate] += delta (creating the key), with a provenance entry.
  void add(ModuleTag tag, const std::string& candidate, double delta);

  /// Adds every score and provenance entry of `other`.
  void absorb(const VoteTally& other);

  /// Multiplies every score and provenance delta by `factor`.
  void scale(double factor);

  /// Rebuilds a tally from recorded parts, e.g. a parsed trace.
  static VoteTally restore(std::map<std::string, double> scores, std::vector<ProvenanceEntry> provenance);

  bool operator==(const VoteTally&) const = default;

 private:
  std::map<std::string, double> scores_;
  std::vector<ProvenanceEntry> provenance_;
};

struct WeightedSample {
  std::string answer;
  double weight;  // certainty in (0, 1]
};

struct BallotEntry {
  std::string candidate;
  double confidence;

  bool operator==(const BallotEntry&) const = default;
};

/// Certainty-weighted vote: scores[k] = Σ weight_i over samples answering k.
VoteTally internal_vote(std::span<const WeightedSample> samples);

/// Divides all scores by their sum (L1).
VoteTally normalize(const VoteTally& tally);

/// scores[k] += tau · c_k for every ballot entry. The ballot must list every
/// internal-vote candidate exactly once and sum to 1 within 1e-3; ballot
/// candidates absent from the tally are initialized at tau · c_k.
VoteTally merge_expert(const VoteTally& tally, std::span<const BallotEntry> ballot, double tau);

/// scores[answer] += tau, creating the key at tau if absent.
VoteTally add_weighted(const VoteTally& tally, const std::string& answer, double tau, ModuleTag tag);

/// Highest-scoring candidate. Scores within a relative 1e-12 of the maximum
/// tie; ties go to the larger internal-vote count, then the lexicographically
/// smallest candidate.
std::string final_answer(const VoteTally& tally);

}  // namespace catts
