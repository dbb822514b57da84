// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Answer-level visual contrastive decoding: each candidate answer is scored
// under the original and the noised image and the two log-probabilities are
// contrasted, after dropping candidates that are implausible under the
// original image.

#include <string>
#include <vector>

namespace catts {

struct CandidateScores {
  std::vector<std::string> candidates;
  std::vector<double> orig_logp;
  std::vector<double> noised_logp;
};

/// Throws LengthMismatch / EmptyInput / PositiveLogProb on invalid input.
void validate(const CandidateScores& scores);

/// out[j] = (1 + alpha)·orig_logp[j] − alpha·noised_logp[j].
std::vector<double> contrastive_scores(const CandidateScores& scores, double alpha);

/// mask[j] = probs[j] ≥ beta · max(probs).
std::vector<bool> plausibility_mask(const std::vector<double>& probs, double beta);

/// exp(orig_logp) normalized over the candidates.
std::vector<double> candidate_probs(const CandidateScores& scores);

struct VcdChoice {
  std::string answer;
  double score;
  std::size_t index;
};

VcdChoice vcd_select(const CandidateScores& scores, double alpha, double beta);

}  // namespace catts
