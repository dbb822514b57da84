// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/http_backend.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <mutex>
#include <optional>
#include <thread>

#include "catts/error.hpp"
#include "catts/log.hpp"
#include "catts/rng.hpp"

namespace catts {

using nlohmann::json;

std::string base64_encode(std::span<const unsigned char> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

namespace {

std::string mime_type(const std::string& path) {
  std::string ext = path.substr(path.find_last_of('.') + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == "png") return "image/png";
  if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
  if (ext == "gif") return "image/gif";
  if (ext == "webp") return "image/webp";
  if (ext == "ppm" || ext == "pnm") return "image/x-portable-pixmap";
  if (ext == "pgm") return "image/x-portable-graymap";
  return "application/octet-stream";
}

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedResponse, what); }

}  // namespace

std::string image_data_url(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read image " + path);
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), {}};
  return "data:" + mime_type(path) + ";base64," + base64_encode(bytes);
}

json build_request_body(const GenerationRequest& request, const std::string& model) {
  validate(request);
  json content = json::array();
  for (const auto& image : request.images) {
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_data_url(image)}}}});
  }
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  const auto& s = request.sampling;
  return {
      {"model", model},
      {"messages", json::array({{{"role", "user"}, {"content", content}}})},
      {"temperature", s.temperature},
      {"top_k", s.top_k},
      {"max_tokens", s.max_tokens},
      {"logprobs", true},
      {"top_logprobs", s.logprob_depth},
      {"seed", s.seed},
  };
}

GenerationResult parse_response(const std::string& body, int logprob_depth, const FormatSpec& spec) {
  const json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) malformed("body is not a JSON object");
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) malformed("no choices");
  const json& choice = (*choices)[0];
  if (!choice.is_object()) malformed("choice is not an object");
  const auto message = choice.find("message");
  if (message == choice.end() || !message->is_object()) malformed("choice has no message");
  const auto content = message->find("content");
  if (content == message->end() || !content->is_string()) malformed("message content is not text");

  GenerationResult result;
  result.trace.text = content->get<std::string>();
  if (const auto fr = choice.find("finish_reason"); fr != choice.end() && fr->is_string()) {
    result.finish_reason = fr->get<std::string>();
  }
  if (const auto m = doc.find("model"); m != doc.end() && m->is_string()) {
    result.backend_id = "http:" + m->get<std::string>();
  }

  const auto lp = choice.find("logprobs");
  if (lp == choice.end() || !lp->is_object()) throw Error(Errc::MissingLogprobs, "choice has no logprobs");
  const auto tokens = lp->find("content");
  if (tokens == lp->end() || !tokens->is_array() || tokens->empty()) {
    throw Error(Errc::MissingLogprobs, "logprobs carry no tokens");
  }
  for (const auto& t : *tokens) {
    const auto top = t.is_object() ? t.find("top_logprobs") : t.end();
    if (!t.is_object() || top == t.end() || !top->is_array()) {
      throw Error(Errc::MissingLogprobs, "token without top_logprobs");
    }
    TokenTopK topk;
    for (const auto& alt : *top) {
      const auto v = alt.is_object() ? alt.find("logprob") : alt.end();
      if (v == alt.end() || !v->is_number()) malformed("top_logprobs entry without a numeric logprob");
      topk.logprobs.push_back(std::min(0.0, v->get<double>()));
    }
    if (static_cast<int>(topk.logprobs.size()) < logprob_depth) {
      throw Error(Errc::MissingLogprobs, "token has " + std::to_string(topk.logprobs.size()) +
                                             " alternatives, " + std::to_string(logprob_depth) +
                                             " requested");
    }
    std::sort(topk.logprobs.begin(), topk.logprobs.end(), std::greater<>());
    topk.logprobs.resize(static_cast<std::size_t>(logprob_depth));
    result.trace.tokens.push_back(std::move(topk));
  }
  result.trace.answer = extract_answer(result.trace.text, spec);
  return result;
}

bool retryable_status(int status) noexcept {
  return status == 408 || status == 429 || (status >= 500 && status <= 599);
}

double backoff_delay(const HttpConfig& config, int attempt, std::uint64_t seed) {
  const double base = std::min(config.backoff_max_s, config.backoff_initial_s * std::ldexp(1.0, attempt));
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
  return base + config.jitter_s * rng.uniform();
}

HttpBackend::HttpBackend(HttpConfig config)
    : HttpBackend(config, make_http_transport(config), [](double s) {
        std::this_thread::sleep_for(std::chrono::duration<double>(s));
      }) {}

HttpBackend::HttpBackend(HttpConfig config, HttpTransport transport, SleepFn sleep)
    : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
  if (config_.max_retries < 0) throw Error(Errc::Config, "max_retries must be ≥ 0");
}

GenerationResult HttpBackend::generate(const GenerationRequest& request) const {
  const std::string body = build_request_body(request, config_.model).dump();
  HttpHeaders headers{{"Content-Type", "application/json"}};
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace_back("Authorization", std::string("Bearer ") + key);
  }

  for (int attempt = 0;; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    Errc failure = Errc::Transport;
    std::string detail;
    std::optional<HttpReply> reply;
    try {
      reply = transport_(config_.path, body, headers);
    } catch (const Error& e) {
      if (e.code() != Errc::Timeout && e.code() != Errc::Transport) throw;
      failure = e.code();
      detail = e.what();
    }
    if (reply) {
      if (reply->status == 200) {
        GenerationResult result = parse_response(reply->body, request.sampling.logprob_depth);
        result.latency_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (result.backend_id.empty()) result.backend_id = id();
        return result;
      }
      detail = "HTTP status " + std::to_string(reply->status);
      if (!retryable_status(reply->status)) throw Error(Errc::Transport, detail);
    }
    if (attempt >= config_.max_retries) {
      throw Error(failure, detail + " after " + std::to_string(attempt + 1) + " attempts");
    }
    sleep_(backoff_delay(config_, attempt, request.sampling.seed));
  }
}

std::vector<double> HttpBackend::score_candidates(const ScoreRequest& request) const {
  static std::once_flag warned;
  std::call_once(warned, [] {
    log_warning("HTTP backend cannot score candidates directly; using generate-then-match");
  });
  if (request.candidates.empty()) throw Error(Errc::EmptyInput, "no candidates to score");
  GenerationRequest gen;
  gen.images = request.images;
  gen.prompt = request.prompt;
  gen.sampling.temperature = 0.0;
  gen.route = request.route;
  const GenerationResult result = generate(gen);
  double mean_logp = 0.0;
  for (const auto& t : result.trace.tokens) mean_logp += t.logprobs.front();
  mean_logp /= static_cast<double>(result.trace.tokens.size());

  std::vector<double> out(request.candidates.size(), std::log(1e-6));
  if (result.trace.answer) {
    for (std::size_t i = 0; i < request.candidates.size(); ++i) {
      if (answers_match(request.candidates[i], *result.trace.answer)) {
        out[i] = std::max(mean_logp, std::log(1e-6));
        break;
      }
    }
  }
  return out;
}

}  // namespace catts
