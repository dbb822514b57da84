// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Token and sequence confidence.
//
// Token confidence is the negative mean of the top-k log-probabilities at a
// generation step (NMLP); sequence confidence averages token NMLPs. All
// downstream consumers work on the certainty scale S = exp(-NMLP) in (0, 1],
// where higher means more certain.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "catts/parallel.hpp"

namespace catts {

/// Top-k log-probabilities at one generation step, natural log, descending.
struct TokenTopK {
  std::vector<double> logprobs;

  bool operator==(const TokenTopK&) const = default;
};

struct SequenceTrace {
  std::vector<TokenTopK> tokens;
  std::string text;
  std::optional<std::string> answer;

  bool operator==(const SequenceTrace&) const = default;
};

/// Checks the TokenTopK invariants (non-empty, all ≤ 0, non-increasing).
void validate_topk(const TokenTopK& topk);

/// -(1/k) Σ logprobs over every entry.
double token_nmlp(const TokenTopK& topk);

/// Same, restricted to the first `depth` entries. Throws InsufficientDepth
/// when fewer are available.
double token_nmlp(const TokenTopK& topk, std::size_t depth);

/// Mean token NMLP over the trace, using all entries of every token.
double sequence_nmlp(const SequenceTrace& trace);
double sequence_nmlp(const SequenceTrace& trace, std::size_t depth);

/// exp(-nmlp).
double certainty(double nmlp);

struct Aggregation {
  enum class Kind { Mean, Tail, MinCert, BottomGroup };

  Kind kind = Kind::Mean;
  std::size_t tail = 1;   // window m for Tail
  double eta = 0.1;       // fraction for BottomGroup

  static Aggregation mean() { return {}; }
  static Aggregation tail_window(std::size_t m) { return {Kind::Tail, m, 0.1}; }
  static Aggregation min_cert() { return {Kind::MinCert, 1, 0.1}; }
  static Aggregation bottom_group(double eta) { return {Kind::BottomGroup, 1, eta}; }

  bool operator==(const Aggregation&) const = default;
};

/// "mean", "tail:8", "min", "bottom:0.1".
std::string to_string(const Aggregation& mode);
Aggregation parse_aggregation(const std::string& text);

struct ConfidenceSummary {
  double nmlp = 0.0;
  double certainty = 1.0;
  Aggregation mode;
};

/// Sequence-level confidence under the chosen aggregation. `depth` limits
/// each token to its first k log-probabilities; 0 means use all entries.
ConfidenceSummary aggregate(const SequenceTrace& trace, const Aggregation& mode,
                            std::size_t depth = 0);

/// Batched certainty over many traces (one per sample).
std::vector<double> certainties(std::span<const SequenceTrace> traces, const Aggregation& mode,
                                std::size_t depth, Exec exec = Exec::Parallel);

}  // namespace catts
