// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/vote.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "catts/error.hpp"

namespace catts {

namespace {

constexpr double kBallotTolerance = 1e-3;
constexpr double kTieTolerance = 1e-12;

}  // namespace

std::string_view to_string(ModuleTag tag) noexcept {
  switch (tag) {
    case ModuleTag::Consistency: return "consistency";
    case ModuleTag::Expert: return "expert";
    case ModuleTag::Reflection: return "reflection";
    case ModuleTag::Check: return "check";
  }
  return "consistency";
}

ModuleTag parse_module_tag(std::string_view text) {
  if (text == "consistency") return ModuleTag::Consistency;
  if (text == "expert") return ModuleTag::Expert;
  if (text == "reflection") return ModuleTag::Reflection;
  if (text == "check") return ModuleTag::Check;
  throw Error(Errc::Config, "unknown module tag '" + std::string(text) + "'");
}

VoteTally VoteTally::restore(std::map<std::string, double> scores,
                             std::vector<ProvenanceEntry> provenance) {
  VoteTally t;
  t.scores_ = std::move(scores);
  t.provenance_ = std::move(provenance);
  return t;
}

double VoteTally::score(const std::string& candidate) const {
  auto it = scores_.find(candidate);
  return it == scores_.end() ? 0.0 : it->second;
}

double VoteTally::mass() const noexcept {
  double total = 0.0;
  for (const auto& [_, s] : scores_) total += s;
  return total;
}

std::size_t VoteTally::internal_count(const std::string& candidate) const {
  return static_cast<std::size_t>(
      std::count_if(provenance_.begin(), provenance_.end(), [&](const ProvenanceEntry& e) {
        return e.tag == ModuleTag::Consistency && e.candidate == candidate;
      }));
}

void VoteTally::add(ModuleTag tag, const std::string& candidate, double delta) {
  scores_[candidate] += delta;
  provenance_.push_back({tag, candidate, delta});
}

void VoteTally::absorb(const VoteTally& other) {
  for (const auto& [k, s] : other.scores_) scores_[k] += s;
  provenance_.insert(provenance_.end(), other.provenance_.begin(), other.provenance_.end());
}

void VoteTally::scale(double factor) {
  for (auto& [_, s] : scores_) s *= factor;
  for (auto& e : provenance_) e.delta *= factor;
}

VoteTally internal_vote(std::span<const WeightedSample> samples) {
  if (samples.empty()) throw Error(Errc::NoSamples, "internal vote needs at least one sample");
  VoteTally tally;
  for (const auto& s : samples) tally.add(ModuleTag::Consistency, s.answer, s.weight);
  return tally;
}

VoteTally normalize(const VoteTally& tally) {
  const double total = tally.mass();
  if (!(total > 0.0)) throw Error(Errc::ZeroMass, "cannot normalize a tally with zero mass");
  VoteTally out = tally;
  out.scale(1.0 / total);
  return out;
}

VoteTally merge_expert(const VoteTally& tally, std::span<const BallotEntry> ballot, double tau) {
  std::set<std::string> seen;
  double sum = 0.0;
  for (const auto& entry : ballot) {
    if (!seen.insert(entry.candidate).second) {
      throw Error(Errc::BallotMismatch, "ballot lists '" + entry.candidate + "' twice");
    }
    if (!(entry.confidence >= 0.0)) {
      throw Error(Errc::UnnormalizedBallot, "negative confidence for '" + entry.candidate + "'");
    }
    sum += entry.confidence;
  }
  // The ballot answers for the internal-vote candidates; keys added by other
  // modules need not appear.
  for (const auto& e : tally.provenance()) {
    if (e.tag == ModuleTag::Consistency && !seen.contains(e.candidate)) {
      throw Error(Errc::BallotMismatch, "ballot omits candidate '" + e.candidate + "'");
    }
  }
  if (std::abs(sum - 1.0) > kBallotTolerance) {
    throw Error(Errc::UnnormalizedBallot, "ballot sums to " + std::to_string(sum));
  }
  VoteTally out = tally;
  if (tau == 0.0) return out;
  for (const auto& entry : ballot) out.add(ModuleTag::Expert, entry.candidate, tau * entry.confidence);
  return out;
}

VoteTally add_weighted(const VoteTally& tally, const std::string& answer, double tau, ModuleTag tag) {
  VoteTally out = tally;
  if (tau == 0.0) return out;
  out.add(tag, answer, tau);
  return out;
}

std::string final_answer(const VoteTally& tally) {
  if (tally.empty()) throw Error(Errc::EmptyTally, "no candidates in tally");
  double best = 0.0;
  for (const auto& [_, s] : tally.scores()) best = std::max(best, s);
  const double floor = best - kTieTolerance * std::abs(best);

  const std::string* winner = nullptr;
  std::size_t winner_count = 0;
  // std::map iterates in lexicographic order, so the first tied candidate
  // with the largest internal count wins.
  for (const auto& [k, s] : tally.scores()) {
    if (s < floor) continue;
    const std::size_t count = tally.internal_count(k);
    if (winner == nullptr || count > winner_count) {
      winner = &k;
      winner_count = count;
    }
  }
  return *winner;
}

}  // namespace catts
