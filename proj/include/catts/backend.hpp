// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

#include <cstdint>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "catts/confidence.hpp"

namespace catts {

struct SamplingParams {
  double temperature = 1.0;
  int top_k = 40;
  int max_tokens = 1024;
  std::uint64_t seed = 0;
  int logprob_depth = 1;
};

/// What a request is for. The simulated backend routes on these; the HTTP
/// backend ignores them.
struct RequestRoute {
  std::string question_id;
  std::string condition = "original";  // original, noised, reflected, planner, voter, critic
  std::size_t sample_index = 0;
  std::vector<std::string> candidates;  // voter requests only
};

struct GenerationRequest {
  std::vector<std::string> images;  // zero to two paths
  std::string prompt;
  SamplingParams sampling;
  RequestRoute route;
};

/// Throws BadHyper on out-of-range sampling parameters or image count.
void validate(const GenerationRequest& request);

struct GenerationResult {
  SequenceTrace trace;
  std::string finish_reason = "stop";
  double latency_ms = 0.0;
  std::string backend_id;
  bool operator==(const GenerationResult&) const = default;
};

nlohmann::json to_json(const GenerationResult& result);
/// Inverse of to_json; throws SchemaViolation.
GenerationResult generation_from_json(const nlohmann::json& doc);

struct ScoreRequest {
  std::vector<std::string> images;
  std::string prompt;
  std::vector<std::string> candidates;
  RequestRoute route;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  /// Safe to call concurrently.
  virtual GenerationResult generate(const GenerationRequest& request) const = 0;
  /// One log-probability ≤ 0 per candidate, over the answer tokens only.
  virtual std::vector<double> score_candidates(const ScoreRequest& request) const = 0;
};

/// Issues one request per index with seed base ⊕ i and collects the results
/// by index, so parallel and serial issuance agree.
std::vector<GenerationResult> generate_many(const Backend& backend, const GenerationRequest& prototype,
                                            std::size_t n, std::uint64_t base_seed,
                                            std::size_t max_inflight);

/// Parses "sim:<scenario path>" or an http(s):// endpoint. The HTTP model
/// name follows a '#', e.g. http://localhost:8000#qwen2.5-vl-7b.
std::shared_ptr<Backend> open_backend(const std::string& spec);

}  // namespace catts
