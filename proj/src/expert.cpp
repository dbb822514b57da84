// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/expert.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <regex>
#include <set>
#include <sstream>

#include "catts/answer.hpp"
#include "catts/error.hpp"
#include "catts/log.hpp"
#include "catts/rng.hpp"

namespace catts {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Strips list bullets, "1." / "1)" numbering, emphasis and quotes.
std::string_view strip_decoration(std::string_view s) {
  s = trim(s);
  static const std::regex bullet(R"(^(?:[-*+•]|\d+[.)])\s+)");
  std::cmatch m;
  if (std::regex_search(s.begin(), s.end(), m, bullet)) s.remove_prefix(static_cast<std::size_t>(m.length(0)));
  auto strip_pair = [&](std::string_view mark) {
    while (s.size() >= 2 * mark.size() && s.starts_with(mark) && s.ends_with(mark)) {
      s = trim(s.substr(mark.size(), s.size() - 2 * mark.size()));
    }
  };
  strip_pair("**");
  strip_pair("\"");
  strip_pair("'");
  strip_pair("`");
  return trim(s);
}

GenerationRequest expert_request(const ExpertContext& ctx, std::string condition, std::string prompt,
                                 int attempt) {
  GenerationRequest req;
  req.images = ctx.images;
  req.prompt = std::move(prompt);
  req.sampling = ctx.sampling;
  req.sampling.seed = derive_seed(ctx.sampling.seed, static_cast<std::uint64_t>(attempt));
  req.route.question_id = ctx.question_id;
  req.route.condition = std::move(condition);
  req.route.sample_index = static_cast<std::size_t>(attempt);
  return req;
}

std::string warn(std::vector<std::string>& sink, std::string message) {
  log_warning(message);
  sink.push_back(message);
  return message;
}

}  // namespace

std::optional<Schedule> parse_schedule(std::string_view reply) {
  static const std::regex word(R"([A-Za-z][A-Za-z_-]*)");
  const std::string text(reply);
  Schedule out;
  for (std::sregex_iterator it(text.begin(), text.end(), word), end; it != end; ++it) {
    std::string w = lower(it->str());
    if (w.rfind("self-", 0) == 0) w = w.substr(5);
    else if (w.rfind("self_", 0) == 0) w = w.substr(5);
    ModuleTag tag;
    if (w == "consistency") tag = ModuleTag::Consistency;
    else if (w == "reflection") tag = ModuleTag::Reflection;
    else if (w == "check") tag = ModuleTag::Check;
    else return std::nullopt;
    if (std::find(out.begin(), out.end(), tag) != out.end()) return std::nullopt;
    out.push_back(tag);
  }
  if (out.size() != 3) return std::nullopt;
  return out;
}

std::optional<std::vector<BallotEntry>> parse_ballot(std::string_view reply,
                                                     const std::vector<std::string>& candidates) {
  if (candidates.empty()) return std::nullopt;
  static const std::regex pair_re(R"(^(.+?)\s*:\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(%?)$)");
  std::vector<std::optional<double>> values(candidates.size());
  std::size_t start = 0;
  const std::string text(reply);
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    const std::string_view line = trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    std::size_t piece_start = 0;
    while (piece_start <= line.size()) {
      const auto sep = std::min(line.find_first_of(",;", piece_start), line.size());
      const std::string piece(strip_decoration(line.substr(piece_start, sep - piece_start)));
      piece_start = sep + 1;
      std::smatch m;
      if (!std::regex_match(piece, m, pair_re)) return std::nullopt;
      const std::string name(strip_decoration(m[1].str()));
      double value = std::stod(m[2].str());
      if (m[3].length() > 0) value /= 100.0;
      if (!(value >= 0.0 && value <= 1.0)) return std::nullopt;
      const auto hit = std::find_if(candidates.begin(), candidates.end(),
                                    [&](const std::string& c) { return c == name || answers_match(c, name); });
      if (hit == candidates.end()) return std::nullopt;
      auto& slot = values[static_cast<std::size_t>(hit - candidates.begin())];
      if (slot) return std::nullopt;
      slot = value;
    }
  }
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  if (std::abs(sum - 1.0) > 1e-3) return std::nullopt;
  std::vector<BallotEntry> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) out.push_back({candidates[i], *values[i] / sum});
  return out;
}

std::vector<BallotEntry> uniform_ballot(const std::vector<std::string>& candidates) {
  std::vector<BallotEntry> out;
  for (const auto& c : candidates) out.push_back({c, 1.0 / static_cast<double>(candidates.size())});
  return out;
}

std::string format_candidates(const std::vector<std::string>& candidates) {
  std::string out;
  for (const auto& c : candidates) {
    if (!out.empty()) out += "\n";
    out += "- " + c;
  }
  return out;
}

PlanOutcome plan(const Backend& expert, const PromptLibrary& prompts, const ExpertContext& ctx) {
  PlanOutcome out;
  const std::string prompt = render(prompts.get(Role::Planner), {{"question", ctx.question}});
  for (int attempt = 0; attempt <= ctx.max_retries; ++attempt) {
    ++out.attempts;
    try {
      const auto reply = expert.generate(expert_request(ctx, "planner", prompt, attempt));
      if (auto s = parse_schedule(reply.trace.text)) {
        out.schedule = std::move(*s);
        return out;
      }
    } catch (const Error& e) {
      warn(out.warnings, "planner attempt " + std::to_string(attempt + 1) + " failed: " + e.what());
    }
  }
  warn(out.warnings, "planner gave no usable schedule for " + ctx.question_id + "; using default order");
  out.schedule = kDefaultSchedule;
  out.fallback = true;
  return out;
}

BallotOutcome vote(const Backend& expert, const PromptLibrary& prompts, const ExpertContext& ctx,
                   const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw Error(Errc::NoSamples, "voter needs at least one candidate");
  BallotOutcome out;
  const std::string prompt = render(prompts.get(Role::Voter), {{"question", ctx.question},
                                                               {"candidates", format_candidates(candidates)}});
  for (int attempt = 0; attempt <= ctx.max_retries; ++attempt) {
    ++out.attempts;
    try {
      GenerationRequest req = expert_request(ctx, "voter", prompt, attempt);
      req.route.candidates = candidates;
      const auto reply = expert.generate(req);
      if (auto b = parse_ballot(reply.trace.text, candidates)) {
        out.ballot = std::move(*b);
        return out;
      }
    } catch (const Error& e) {
      warn(out.warnings, "voter attempt " + std::to_string(attempt + 1) + " failed: " + e.what());
    }
  }
  warn(out.warnings, "voter gave no usable ballot for " + ctx.question_id + "; using a uniform ballot");
  out.ballot = uniform_ballot(candidates);
  out.fallback = true;
  return out;
}

CritiqueOutcome critique(const Backend& expert, const PromptLibrary& prompts, const ExpertContext& ctx,
                         const std::string& initial_answer, double initial_certainty) {
  CritiqueOutcome out;
  char confidence[32];
  std::snprintf(confidence, sizeof confidence, "%.2f", initial_certainty);
  const std::string prompt =
      render(prompts.get(Role::Critic), {{"question", ctx.question},
                                         {"initial_answer", initial_answer},
                                         {"initial_confidence", confidence}});
  for (int attempt = 0; attempt <= ctx.max_retries; ++attempt) {
    ++out.attempts;
    try {
      const auto reply = expert.generate(expert_request(ctx, "critic", prompt, attempt));
      const auto text = trim(reply.trace.text);
      if (!text.empty()) {
        out.text = std::string(text);
        return out;
      }
    } catch (const Error& e) {
      warn(out.warnings, "critic attempt " + std::to_string(attempt + 1) + " failed: " + e.what());
    }
  }
  throw Error(Errc::CritiqueUnavailable, "no critique for " + ctx.question_id + " after " +
                                             std::to_string(out.attempts) + " attempts");
}

}  // namespace catts
