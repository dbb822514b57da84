// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "catts/error.hpp"

namespace catts {

namespace {

constexpr double kPositiveTolerance = 1e-9;

double nmlp_of(std::span<const double> logprobs) {
  if (logprobs.empty()) throw Error(Errc::EmptyTopK, "top-k list is empty");
  double sum = 0.0;
  for (double lp : logprobs) {
    if (lp > kPositiveTolerance) {
      throw Error(Errc::PositiveLogProb, "log-probability " + std::to_string(lp) + " > 0");
    }
    sum += lp;
  }
  // Entries inside the tolerance band must not produce a negative NMLP.
  return std::max(0.0, -sum / static_cast<double>(logprobs.size()));
}

std::span<const double> first_k(const TokenTopK& topk, std::size_t depth) {
  if (depth == 0) return topk.logprobs;
  if (topk.logprobs.size() < depth) {
    throw Error(Errc::InsufficientDepth, "token carries " + std::to_string(topk.logprobs.size()) +
                                             " log-probabilities, need " + std::to_string(depth));
  }
  return std::span<const double>(topk.logprobs).first(depth);
}

std::vector<double> token_nmlps(const SequenceTrace& trace, std::size_t depth) {
  if (trace.tokens.empty()) throw Error(Errc::EmptyTrace, "trace has no tokens");
  std::vector<double> out;
  out.reserve(trace.tokens.size());
  for (const auto& tok : trace.tokens) out.push_back(nmlp_of(first_k(tok, depth)));
  return out;
}

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

void validate_topk(const TokenTopK& topk) {
  nmlp_of(topk.logprobs);
  for (std::size_t i = 1; i < topk.logprobs.size(); ++i) {
    if (topk.logprobs[i] > topk.logprobs[i - 1]) {
      throw Error(Errc::SchemaViolation, "top-k log-probabilities are not in descending order");
    }
  }
}

double token_nmlp(const TokenTopK& topk) { return nmlp_of(topk.logprobs); }

double token_nmlp(const TokenTopK& topk, std::size_t depth) {
  return nmlp_of(first_k(topk, depth));
}

double sequence_nmlp(const SequenceTrace& trace) { return sequence_nmlp(trace, 0); }

double sequence_nmlp(const SequenceTrace& trace, std::size_t depth) {
  return mean_of(token_nmlps(trace, depth));
}

double certainty(double nmlp) {
  if (!(nmlp >= 0.0)) throw Error(Errc::NegativeNmlp, "nmlp " + std::to_string(nmlp) + " < 0");
  return std::exp(-nmlp);
}

std::string to_string(const Aggregation& mode) {
  switch (mode.kind) {
    case Aggregation::Kind::Mean: return "mean";
    case Aggregation::Kind::Tail: return "tail:" + std::to_string(mode.tail);
    case Aggregation::Kind::MinCert: return "min";
    case Aggregation::Kind::BottomGroup: {
      std::string eta = std::to_string(mode.eta);
      eta.erase(eta.find_last_not_of('0') + 1);
      if (eta.back() == '.') eta.pop_back();
      return "bottom:" + eta;
    }
  }
  return "mean";
}

Aggregation parse_aggregation(const std::string& text) {
  if (text == "mean") return Aggregation::mean();
  if (text == "min") return Aggregation::min_cert();
  try {
    if (text.rfind("tail:", 0) == 0) return Aggregation::tail_window(std::stoul(text.substr(5)));
    if (text.rfind("bottom:", 0) == 0) return Aggregation::bottom_group(std::stod(text.substr(7)));
  } catch (const std::logic_error&) {
  }
  throw Error(Errc::BadWindow, "unknown aggregation mode '" + text + "'");
}

ConfidenceSummary aggregate(const SequenceTrace& trace, const Aggregation& mode,
                            std::size_t depth) {
  std::vector<double> per_token = token_nmlps(trace, depth);
  const std::size_t n = per_token.size();
  double nmlp = 0.0;
  switch (mode.kind) {
    case Aggregation::Kind::Mean:
      nmlp = mean_of(per_token);
      break;
    case Aggregation::Kind::Tail:
      if (mode.tail < 1 || mode.tail > n) {
        throw Error(Errc::BadWindow, "tail window " + std::to_string(mode.tail) +
                                         " outside [1, " + std::to_string(n) + "]");
      }
      nmlp = mean_of(std::span<const double>(per_token).last(mode.tail));
      break;
    case Aggregation::Kind::MinCert:
      nmlp = *std::max_element(per_token.begin(), per_token.end());
      break;
    case Aggregation::Kind::BottomGroup: {
      if (!(mode.eta > 0.0 && mode.eta <= 1.0)) {
        throw Error(Errc::BadWindow, "bottom-group fraction " + std::to_string(mode.eta) +
                                         " outside (0, 1]");
      }
      // Guard against η·T landing a hair above an integer.
      auto group = static_cast<std::size_t>(std::ceil(mode.eta * static_cast<double>(n) - 1e-9));
      group = std::clamp<std::size_t>(group, 1, n);
      std::partial_sort(per_token.begin(), per_token.begin() + static_cast<std::ptrdiff_t>(group),
                        per_token.end(), std::greater<>());
      nmlp = mean_of(std::span<const double>(per_token).first(group));
      break;
    }
  }
  return {nmlp, certainty(nmlp), mode};
}

std::vector<double> certainties(std::span<const SequenceTrace> traces, const Aggregation& mode,
                                std::size_t depth, Exec exec) {
  std::vector<double> out(traces.size());
  for_each_index(traces.size(), exec,
                 [&](std::size_t i) { out[i] = aggregate(traces[i], mode, depth).certainty; });
  return out;
}

}  // namespace catts
