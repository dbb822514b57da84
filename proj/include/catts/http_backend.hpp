// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Client for the chat-completions wire protocol (POST /v1/chat/completions)
// with per-token log-probabilities. Images travel as base64 data URLs.

#include <functional>
#include <json.hpp>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "catts/answer.hpp"
#include "catts/backend.hpp"

namespace catts {

struct HttpConfig {
  std::string endpoint;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "CATTS_API_KEY";
  double timeout_s = 60.0;
  int max_retries = 3;
  double backoff_initial_s = 0.5;
  double backoff_max_s = 8.0;
  double jitter_s = 0.25;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpReply {
  int status = 0;
  std::string body;
};

/// Sends one POST. Throws Timeout or Transport when no reply arrives.
using HttpTransport =
    std::function<HttpReply(const std::string& path, const std::string& body, const HttpHeaders& headers)>;
using SleepFn = std::function<void(double seconds)>;

std::string base64_encode(std::span<const unsigned char> bytes);
/// Reads the file and returns data:<mime>;base64,<payload>.
std::string image_data_url(const std::string& path);

nlohmann::json build_request_body(const GenerationRequest& request, const std::string& model);
/// Parses a 200 body. Throws MalformedResponse or MissingLogprobs.
GenerationResult parse_response(const std::string& body, int logprob_depth,
                                const FormatSpec& spec = FormatSpec());

bool retryable_status(int status) noexcept;
/// min(initial·2^attempt, max) plus a jitter in [0, jitter_s) drawn from
/// the seed.
double backoff_delay(const HttpConfig& config, int attempt, std::uint64_t seed);

HttpTransport make_http_transport(const HttpConfig& config);

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpConfig config);
  HttpBackend(HttpConfig config, HttpTransport transport, SleepFn sleep);

  std::string id() const override { return "http:" + config_.model; }
  GenerationResult generate(const GenerationRequest& request) const override;
  /// The protocol has no scoring call: one greedy generation is matched
  /// against the candidates. The match gets the mean top-1 log-probability
  /// of the reply and every other candidate gets ln 1e-6.
  std::vector<double> score_candidates(const ScoreRequest& request) const override;

  const HttpConfig& config() const noexcept { return config_; }

 private:
  HttpConfig config_;
  HttpTransport transport_;
  SleepFn sleep_;
};

}  // namespace catts
