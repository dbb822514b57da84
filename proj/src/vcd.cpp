// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/vcd.hpp"

#include <algorithm>
#include <cmath>

#include "catts/error.hpp"

namespace catts {

void validate(const CandidateScores& scores) {
  const std::size_t n = scores.candidates.size();
  if (scores.orig_logp.size() != n || scores.noised_logp.size() != n) {
    throw Error(Errc::LengthMismatch, "candidate and score lists differ in length");
  }
  if (n == 0) throw Error(Errc::EmptyInput, "no candidates to score");
  for (std::size_t j = 0; j < n; ++j) {
    if (scores.orig_logp[j] > 1e-9 || scores.noised_logp[j] > 1e-9) {
      throw Error(Errc::PositiveLogProb, "candidate '" + scores.candidates[j] +
                                             "' has a positive log-probability");
    }
  }
}

std::vector<double> contrastive_scores(const CandidateScores& scores, double alpha) {
  validate(scores);
  std::vector<double> out(scores.candidates.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = (1.0 + alpha) * scores.orig_logp[j] - alpha * scores.noised_logp[j];
  }
  return out;
}

std::vector<bool> plausibility_mask(const std::vector<double>& probs, double beta) {
  if (probs.empty()) throw Error(Errc::EmptyInput, "no probabilities");
  const double top = *std::max_element(probs.begin(), probs.end());
  const double cutoff = beta * top;
  std::vector<bool> mask(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) mask[j] = probs[j] >= cutoff;
  return mask;
}

std::vector<double> candidate_probs(const CandidateScores& scores) {
  validate(scores);
  const double top = *std::max_element(scores.orig_logp.begin(), scores.orig_logp.end());
  std::vector<double> probs(scores.orig_logp.size());
  double z = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    probs[j] = std::exp(scores.orig_logp[j] - top);
    z += probs[j];
  }
  for (double& p : probs) p /= z;
  return probs;
}

VcdChoice vcd_select(const CandidateScores& scores, double alpha, double beta) {
  const std::vector<double> contrast = contrastive_scores(scores, alpha);

  const std::vector<double> probs = candidate_probs(scores);
  const std::vector<bool> mask = plausibility_mask(probs, beta);

  std::size_t best = probs.size();
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (!mask[j]) continue;
    if (best == probs.size() || contrast[j] > contrast[best] ||
        (contrast[j] == contrast[best] && scores.candidates[j] < scores.candidates[best])) {
      best = j;
    }
  }
  return {scores.candidates[best], contrast[best], best};
}

}  // namespace catts
