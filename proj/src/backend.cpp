// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/backend.hpp"

#include <cmath>

#include "catts/error.hpp"
#include "catts/http_backend.hpp"
#include "catts/parallel.hpp"
#include "catts/rng.hpp"
#include "catts/simulated.hpp"

namespace catts {

void validate(const GenerationRequest& request) {
  const auto& s = request.sampling;
  if (!(s.temperature >= 0.0) || !std::isfinite(s.temperature)) {
    throw Error(Errc::BadHyper, "temperature must be ≥ 0");
  }
  if (s.top_k < 1) throw Error(Errc::BadHyper, "top_k must be ≥ 1");
  if (s.logprob_depth < 1) throw Error(Errc::BadHyper, "logprob depth must be ≥ 1");
  if (s.max_tokens < 1) throw Error(Errc::BadHyper, "max_tokens must be ≥ 1");
  if (request.images.size() > 2) throw Error(Errc::BadHyper, "at most two images per request");
}

nlohmann::json to_json(const GenerationResult& r) {
  nlohmann::json tokens = nlohmann::json::array();
  for (const auto& t : r.trace.tokens) tokens.push_back(t.logprobs);
  return {{"text", r.trace.text},
          {"answer", r.trace.answer ? nlohmann::json(*r.trace.answer) : nlohmann::json(nullptr)},
          {"logprobs", tokens},
          {"finish_reason", r.finish_reason},
          {"latency_ms", r.latency_ms},
          {"backend_id", r.backend_id}};
}

GenerationResult generation_from_json(const nlohmann::json& doc) {
  try {
    GenerationResult r;
    r.trace.text = doc.at("text").get<std::string>();
    if (const auto& a = doc.at("answer"); !a.is_null()) r.trace.answer = a.get<std::string>();
    for (const auto& row : doc.at("logprobs")) {
      TokenTopK t{row.get<std::vector<double>>()};
      validate_topk(t);
      r.trace.tokens.push_back(std::move(t));
    }
    r.finish_reason = doc.at("finish_reason").get<std::string>();
    r.latency_ms = doc.at("latency_ms").get<double>();
    r.backend_id = doc.at("backend_id").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaViolation, std::string("generation record: ") + e.what());
  }
}

std::vector<GenerationResult> generate_many(const Backend& backend, const GenerationRequest& prototype,
                                            std::size_t n, std::uint64_t base_seed,
                                            std::size_t max_inflight) {
  std::vector<GenerationResult> out(n);
  const Exec exec = max_inflight > 1 ? Exec::Parallel : Exec::Serial;
  for_each_index(
      n, exec,
      [&](std::size_t i) {
        GenerationRequest req = prototype;
        req.sampling.seed = derive_seed(base_seed, i);
        req.route.sample_index = i;
        out[i] = backend.generate(req);
      },
      static_cast<int>(max_inflight));
  return out;
}

std::shared_ptr<Backend> open_backend(const std::string& spec) {
  if (spec.rfind("sim:", 0) == 0) return SimulatedBackend::load(spec.substr(4));
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    HttpConfig cfg;
    const auto hash = spec.find('#');
    cfg.endpoint = spec.substr(0, hash);
    if (hash != std::string::npos) cfg.model = spec.substr(hash + 1);
    if (cfg.model.empty()) throw Error(Errc::Config, "HTTP backend needs a model: " + spec + "#<model>");
    return std::make_shared<HttpBackend>(std::move(cfg));
  }
  throw Error(Errc::Config, "backend must be sim:<path> or http(s)://host#model, got '" + spec + "'");
}

}  // namespace catts
