// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/simulated.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "catts/answer.hpp"
#include "catts/error.hpp"
#include "catts/rng.hpp"

namespace catts {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 6> kConditions{"original", "noised", "reflected",
                                                      "planner",  "voter",  "critic"};

struct Where {
  std::string_view source;
  std::size_t line;
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::SchemaViolation, std::string(source) + ":" + std::to_string(line) + ": " + what);
  }
};

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const Where& at, std::string_view what) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      at.fail("unknown " + std::string(what) + " field '" + key + "'");
    }
  }
}

double number(const json& v, const Where& at, const std::string& field) {
  if (!v.is_number()) at.fail("'" + field + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) at.fail("'" + field + "' must be finite");
  return x;
}

std::string string_field(const json& obj, const char* field, const Where& at) {
  const auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) at.fail(std::string("'") + field + "' must be a string");
  return it->get<std::string>();
}

TokenTopK token(const json& v, const Where& at) {
  if (!v.is_array()) at.fail("each logprobs row must be an array");
  TokenTopK t;
  for (const auto& x : v) t.logprobs.push_back(number(x, at, "logprobs"));
  try {
    validate_topk(t);
  } catch (const Error& e) {
    at.fail(e.what());
  }
  return t;
}

ScenarioVariant parse_variant(const json& v, const Where& at) {
  if (!v.is_object()) at.fail("variant must be an object");
  reject_unknown_keys(v, {"weight", "text", "answer", "logprobs", "token_logprobs"}, at, "variant");
  ScenarioVariant out;
  if (v.contains("weight")) out.weight = number(v["weight"], at, "weight");
  if (!(out.weight > 0.0)) at.fail("variant weight must be positive");
  if (v.contains("answer")) out.answer = string_field(v, "answer", at);
  if (v.contains("text")) {
    out.text = string_field(v, "text", at);
  } else if (out.answer) {
    out.text = "Answer: " + *out.answer;
  } else {
    at.fail("variant needs 'text' or 'answer'");
  }
  if (v.contains("logprobs") && v.contains("token_logprobs")) {
    at.fail("give 'logprobs' or 'token_logprobs', not both");
  }
  if (v.contains("logprobs")) {
    if (!v["logprobs"].is_array() || v["logprobs"].empty()) at.fail("'logprobs' must be a non-empty array");
    for (const auto& row : v["logprobs"]) out.tokens.push_back(token(row, at));
  } else if (v.contains("token_logprobs")) {
    const auto& flat = v["token_logprobs"];
    if (!flat.is_array() || flat.empty()) at.fail("'token_logprobs' must be a non-empty array");
    for (const auto& x : flat) out.tokens.push_back(token(json::array({x}), at));
  } else {
    out.tokens.push_back(TokenTopK{{0.0}});
  }
  return out;
}

std::map<std::string, double> number_map(const json& v, const Where& at, const char* field) {
  if (!v.is_object()) at.fail(std::string("'") + field + "' must be an object");
  std::map<std::string, double> out;
  for (const auto& [k, x] : v.items()) out[k] = number(x, at, std::string(field) + "." + k);
  return out;
}

ScenarioEntry parse_entry(const json& e, const Where& at) {
  if (!e.is_object()) at.fail("entry must be an object");
  reject_unknown_keys(e, {"id", "condition", "selection", "variants", "candidate_scores", "ballot"}, at,
                      "entry");
  ScenarioEntry out;
  out.id = string_field(e, "id", at);
  out.condition = string_field(e, "condition", at);
  if (e.contains("selection")) out.selection = string_field(e, "selection", at);
  if (e.contains("variants")) {
    if (!e["variants"].is_array()) at.fail("'variants' must be an array");
    for (const auto& v : e["variants"]) out.variants.push_back(parse_variant(v, at));
  }
  if (e.contains("candidate_scores")) out.candidate_scores = number_map(e["candidate_scores"], at, "candidate_scores");
  if (e.contains("ballot")) out.ballot = number_map(e["ballot"], at, "ballot");
  return out;
}

void apply_settings(Scenario& s, const json& v, const Where& at) {
  if (!v.is_object()) at.fail("'scenario' must be an object");
  reject_unknown_keys(v, {"backend_id", "selection", "floor_logprob"}, at, "scenario");
  if (v.contains("backend_id")) s.backend_id = string_field(v, "backend_id", at);
  if (v.contains("selection")) s.selection = string_field(v, "selection", at);
  if (v.contains("floor_logprob")) s.floor_logprob = number(v["floor_logprob"], at, "floor_logprob");
  if (s.selection != "weighted" && s.selection != "cycle") at.fail("selection must be weighted or cycle");
  if (s.floor_logprob > 0.0) at.fail("floor_logprob must be ≤ 0");
}

void add_at(Scenario& s, ScenarioEntry entry, const Where& at) {
  try {
    s.add(std::move(entry));
  } catch (const Error& e) {
    at.fail(e.what());
  }
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

/// Line of the n-th element of the top-level "entries" array, found by a
/// depth-tracking scan of the raw text.
std::vector<std::size_t> entry_lines(std::string_view text) {
  std::vector<std::size_t> lines;
  const auto key = text.find("\"entries\"");
  if (key == std::string_view::npos) return lines;
  std::size_t i = text.find('[', key);
  int depth = 0;
  bool in_string = false;
  std::size_t line = line_of(text, i);
  for (++i; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') ++line;
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') {
      if (depth++ == 0) lines.push_back(line);
    } else if (c == '}' || c == ']') {
      if (depth-- == 0) break;
    }
  }
  return lines;
}

std::string format_ballot(const ScenarioEntry& e, const std::vector<std::string>& candidates) {
  double total = 0.0;
  for (const auto& c : candidates) {
    if (const auto it = e.ballot.find(c); it != e.ballot.end()) total += it->second;
  }
  std::ostringstream out;
  out.precision(17);
  for (const auto& c : candidates) {
    const auto it = e.ballot.find(c);
    double value = 1.0 / static_cast<double>(candidates.size());
    if (total > 0.0) value = it == e.ballot.end() ? 0.0 : it->second / total;
    out << c << ": " << value << "\n";
  }
  return out.str();
}

}  // namespace

void Scenario::add(ScenarioEntry entry) {
  if (std::find(kConditions.begin(), kConditions.end(), entry.condition) == kConditions.end()) {
    throw Error(Errc::SchemaViolation, "unknown condition '" + entry.condition + "'");
  }
  if (!entry.selection.empty() && entry.selection != "weighted" && entry.selection != "cycle") {
    throw Error(Errc::SchemaViolation, "selection must be weighted or cycle");
  }
  if (entry.variants.empty() && entry.candidate_scores.empty() && entry.ballot.empty()) {
    throw Error(Errc::SchemaViolation, "entry " + entry.id + "/" + entry.condition + " is empty");
  }
  for (const auto& v : entry.variants) {
    if (!(v.weight > 0.0)) throw Error(Errc::SchemaViolation, "variant weight must be positive");
    if (v.tokens.empty()) throw Error(Errc::SchemaViolation, "variant has no tokens");
    for (const auto& t : v.tokens) validate_topk(t);
  }
  for (const auto& [c, lp] : entry.candidate_scores) {
    if (!(lp <= 0.0)) throw Error(Errc::SchemaViolation, "candidate score for '" + c + "' must be ≤ 0");
  }
  for (const auto& [c, x] : entry.ballot) {
    if (!(x >= 0.0)) throw Error(Errc::SchemaViolation, "ballot value for '" + c + "' must be ≥ 0");
  }
  auto key = std::make_pair(entry.id, entry.condition);
  if (!entries.emplace(std::move(key), std::move(entry)).second) {
    throw Error(Errc::SchemaViolation, "duplicate entry");
  }
}

Scenario parse_scenario(std::string_view text, std::string_view source) {
  Scenario s;
  const json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded() && whole.is_object() && whole.contains("entries")) {
    const Where top{source, 1};
    reject_unknown_keys(whole, {"scenario", "entries"}, top, "document");
    if (whole.contains("scenario")) apply_settings(s, whole["scenario"], {source, line_of(text, text.find("\"scenario\""))});
    if (!whole["entries"].is_array()) top.fail("'entries' must be an array");
    const auto lines = entry_lines(text);
    for (std::size_t i = 0; i < whole["entries"].size(); ++i) {
      const Where at{source, i < lines.size() ? lines[i] : 1};
      add_at(s, parse_entry(whole["entries"][i], at), at);
    }
    return s;
  }

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const Where at{source, line_no};
    const json v = json::parse(line, nullptr, false);
    if (v.is_discarded()) at.fail("not valid JSON");
    if (v.is_object() && v.contains("scenario") && v.size() == 1) {
      apply_settings(s, v["scenario"], at);
      continue;
    }
    add_at(s, parse_entry(v, at), at);
  }
  if (s.entries.empty()) throw Error(Errc::SchemaViolation, std::string(source) + ": no entries");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read scenario " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.string());
}

SimulatedBackend::SimulatedBackend(Scenario scenario) : scenario_(std::move(scenario)) {}

std::shared_ptr<SimulatedBackend> SimulatedBackend::load(const std::filesystem::path& path) {
  return std::make_shared<SimulatedBackend>(load_scenario(path));
}

const ScenarioEntry& SimulatedBackend::entry(const RequestRoute& route) const {
  const auto it = scenario_.entries.find({route.question_id, route.condition});
  if (it == scenario_.entries.end()) {
    throw Error(Errc::MissingScenarioEntry, "(" + route.question_id + ", " + route.condition + ")");
  }
  return it->second;
}

GenerationResult SimulatedBackend::generate(const GenerationRequest& request) const {
  validate(request);
  const ScenarioEntry& e = entry(request.route);
  GenerationResult result;
  result.backend_id = scenario_.backend_id;

  if (!e.ballot.empty() && e.variants.empty()) {
    if (request.route.candidates.empty()) {
      throw Error(Errc::MissingScenarioEntry, "ballot entry " + e.id + " needs request candidates");
    }
    result.trace.text = format_ballot(e, request.route.candidates);
    result.trace.tokens = {TokenTopK{{0.0}}};
    return result;
  }
  if (e.variants.empty()) {
    throw Error(Errc::MissingScenarioEntry, "entry " + e.id + "/" + e.condition + " has no variants");
  }

  const std::string& mode = e.selection.empty() ? scenario_.selection : e.selection;
  std::size_t pick = 0;
  if (mode == "cycle") {
    pick = request.route.sample_index % e.variants.size();
  } else if (request.sampling.temperature == 0.0) {
    for (std::size_t i = 1; i < e.variants.size(); ++i) {
      if (e.variants[i].weight > e.variants[pick].weight) pick = i;
    }
  } else {
    std::vector<double> weights;
    for (const auto& v : e.variants) weights.push_back(v.weight);
    Rng rng(request.sampling.seed);
    pick = rng.weighted_index(weights);
  }

  const ScenarioVariant& v = e.variants[pick];
  for (const auto& t : v.tokens) {
    if (static_cast<int>(t.logprobs.size()) < request.sampling.logprob_depth) {
      throw Error(Errc::MissingLogprobs, "scripted depth " + std::to_string(t.logprobs.size()) +
                                             " below requested " +
                                             std::to_string(request.sampling.logprob_depth));
    }
  }
  result.trace.tokens = v.tokens;
  result.trace.text = v.text;
  static const FormatSpec spec;
  result.trace.answer = v.answer ? v.answer : extract_answer(v.text, spec);
  return result;
}

std::vector<double> SimulatedBackend::score_candidates(const ScoreRequest& request) const {
  if (request.candidates.empty()) throw Error(Errc::EmptyInput, "no candidates to score");
  const ScenarioEntry& e = entry(request.route);
  std::vector<double> out;
  out.reserve(request.candidates.size());
  for (const auto& c : request.candidates) {
    auto it = e.candidate_scores.find(c);
    if (it == e.candidate_scores.end()) {
      it = std::find_if(e.candidate_scores.begin(), e.candidate_scores.end(),
                        [&](const auto& kv) { return answers_match(kv.first, c); });
    }
    out.push_back(it == e.candidate_scores.end() ? scenario_.floor_logprob : it->second);
  }
  return out;
}

}  // namespace catts
