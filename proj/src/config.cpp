// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "catts/error.hpp"

namespace catts {

using nlohmann::json;

namespace {

template <class T>
void read(const json& doc, const char* key, T& out) {
  const auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::Config, std::string("bad value for '") + key + "': " + it->dump());
  }
}

Schedule schedule_from_json(const json& v) {
  if (!v.is_array()) throw Error(Errc::Config, "'schedule' must be an array of module names");
  std::string joined;
  for (const auto& x : v) {
    if (!x.is_string()) throw Error(Errc::Config, "'schedule' entries must be strings");
    joined += x.get<std::string>() + ",";
  }
  auto s = parse_schedule(joined);
  if (!s) throw Error(Errc::Config, "'schedule' must name consistency, reflection and check once each");
  return *s;
}

}  // namespace

std::string to_string(const Schedule& schedule) {
  std::string out;
  for (const auto tag : schedule) {
    if (!out.empty()) out += ",";
    out += to_string(tag);
  }
  return out;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::Config, what);
  };
  require(c.n >= 1, "n must be ≥ 1");
  require(c.temperature >= 0.0, "temperature must be ≥ 0");
  require(c.expert_temperature >= 0.0, "expert_temperature must be ≥ 0");
  require(c.top_k >= 1, "top_k must be ≥ 1");
  require(c.max_tokens >= 1, "max_tokens must be ≥ 1");
  require(c.logprob_depth >= 1, "logprob_depth must be ≥ 1");
  require(c.tau1 >= 0.0 && c.tau2 >= 0.0 && c.tau3 >= 0.0, "module weights must be ≥ 0");
  require(c.vcd_alpha >= 0.0, "vcd_alpha must be ≥ 0");
  require(c.vcd_beta >= 0.0 && c.vcd_beta <= 1.0, "vcd_beta must lie in [0, 1]");
  require(c.expert_retries >= 0, "expert_retries must be ≥ 0");
  require(c.reflection_samples >= 1, "reflection_samples must be ≥ 1");
  require(c.noise_sigma >= 0.0, "noise_sigma must be ≥ 0");
  require(c.reward_alpha >= 0.0 && c.reward_beta >= 0.0, "reward hyperparameters must be ≥ 0");
  require(c.ece_bins >= 1, "ece_bins must be ≥ 1");
  require(c.filter_keep > 0.0 && c.filter_keep <= 1.0, "filter_keep must lie in (0, 1]");
  require(c.max_inflight >= 1, "max_inflight must be ≥ 1");
  FormatSpec{c.answer_pattern};
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::Config, "config must be a JSON object");
  static const std::set<std::string> known{
      "n", "temperature", "top_k", "max_tokens", "logprob_depth", "aggregation", "answer_pattern",
      "tau1", "tau2", "tau3", "vcd_alpha", "vcd_beta", "expert_retries", "expert_temperature",
      "enable_planner", "enable_consistency", "enable_voter", "enable_reflection", "enable_check",
      "schedule", "reflection_samples", "reflection_gate", "noise_sigma", "reward_alpha",
      "reward_beta", "ece_bins", "filter_keep", "backend", "expert_backend", "prompts_dir", "seed",
      "max_inflight", "record_timings"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw Error(Errc::Config, "unknown config key '" + key + "'");
  }
  RunConfig c;
  read(doc, "n", c.n);
  read(doc, "temperature", c.temperature);
  read(doc, "top_k", c.top_k);
  read(doc, "max_tokens", c.max_tokens);
  read(doc, "logprob_depth", c.logprob_depth);
  if (doc.contains("aggregation")) {
    std::string text;
    read(doc, "aggregation", text);
    try {
      c.aggregation = parse_aggregation(text);
    } catch (const Error& e) {
      throw Error(Errc::Config, e.what());
    }
  }
  read(doc, "answer_pattern", c.answer_pattern);
  read(doc, "tau1", c.tau1);
  read(doc, "tau2", c.tau2);
  read(doc, "tau3", c.tau3);
  read(doc, "vcd_alpha", c.vcd_alpha);
  read(doc, "vcd_beta", c.vcd_beta);
  read(doc, "expert_retries", c.expert_retries);
  read(doc, "expert_temperature", c.expert_temperature);
  read(doc, "enable_planner", c.enable_planner);
  read(doc, "enable_consistency", c.enable_consistency);
  read(doc, "enable_voter", c.enable_voter);
  read(doc, "enable_reflection", c.enable_reflection);
  read(doc, "enable_check", c.enable_check);
  if (const auto it = doc.find("schedule"); it != doc.end() && !it->is_null()) {
    c.schedule = schedule_from_json(*it);
  }
  read(doc, "reflection_samples", c.reflection_samples);
  if (const auto it = doc.find("reflection_gate"); it != doc.end() && !it->is_null()) {
    double gate = 0.0;
    read(doc, "reflection_gate", gate);
    c.reflection_gate = gate;
  }
  read(doc, "noise_sigma", c.noise_sigma);
  read(doc, "reward_alpha", c.reward_alpha);
  read(doc, "reward_beta", c.reward_beta);
  read(doc, "ece_bins", c.ece_bins);
  read(doc, "filter_keep", c.filter_keep);
  read(doc, "backend", c.backend);
  read(doc, "expert_backend", c.expert_backend);
  read(doc, "prompts_dir", c.prompts_dir);
  read(doc, "seed", c.seed);
  read(doc, "max_inflight", c.max_inflight);
  read(doc, "record_timings", c.record_timings);
  validate(c);
  return c;
}

json to_json(const RunConfig& c) {
  json schedule = nullptr;
  if (c.schedule) {
    schedule = json::array();
    for (const auto tag : *c.schedule) schedule.push_back(std::string(to_string(tag)));
  }
  return {
      {"n", c.n},
      {"temperature", c.temperature},
      {"top_k", c.top_k},
      {"max_tokens", c.max_tokens},
      {"logprob_depth", c.logprob_depth},
      {"aggregation", to_string(c.aggregation)},
      {"answer_pattern", c.answer_pattern},
      {"tau1", c.tau1},
      {"tau2", c.tau2},
      {"tau3", c.tau3},
      {"vcd_alpha", c.vcd_alpha},
      {"vcd_beta", c.vcd_beta},
      {"expert_retries", c.expert_retries},
      {"expert_temperature", c.expert_temperature},
      {"enable_planner", c.enable_planner},
      {"enable_consistency", c.enable_consistency},
      {"enable_voter", c.enable_voter},
      {"enable_reflection", c.enable_reflection},
      {"enable_check", c.enable_check},
      {"schedule", schedule},
      {"reflection_samples", c.reflection_samples},
      {"reflection_gate", c.reflection_gate ? json(*c.reflection_gate) : json(nullptr)},
      {"noise_sigma", c.noise_sigma},
      {"reward_alpha", c.reward_alpha},
      {"reward_beta", c.reward_beta},
      {"ece_bins", c.ece_bins},
      {"filter_keep", c.filter_keep},
      {"backend", c.backend},
      {"expert_backend", c.expert_backend},
      {"prompts_dir", c.prompts_dir},
      {"seed", c.seed},
      {"max_inflight", c.max_inflight},
      {"record_timings", c.record_timings},
  };
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read config " + path.string());
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::Config, path.string() + " is not valid JSON");
  RunConfig config = config_from_json(doc);
  const auto base = path.parent_path();
  auto anchor = [&](std::string& spec, std::string_view prefix) {
    if (spec.empty() || spec.rfind(prefix, 0) != 0) return;
    const std::filesystem::path rest = spec.substr(prefix.size());
    if (rest.is_relative() && !base.empty()) spec = std::string(prefix) + (base / rest).lexically_normal().string();
  };
  anchor(config.backend, "sim:");
  anchor(config.expert_backend, "sim:");
  anchor(config.prompts_dir, "");
  return config;
}

}  // namespace catts
