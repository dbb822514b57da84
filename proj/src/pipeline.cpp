// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>

#include "catts/answer.hpp"
#include "catts/error.hpp"
#include "catts/log.hpp"
#include "catts/noisegen.hpp"
#include "catts/rng.hpp"
#include "catts/vcd.hpp"

namespace catts {

using nlohmann::json;

std::uint64_t question_seed(const RunConfig& config, const std::string& question_id) {
  return config.seed ^ fnv1a64(question_id);
}

double TraceRecord::expected_mass(const RunConfig& config) const {
  double mass = 0.0;
  for (const auto& step : steps) {
    if (!step.ran) continue;
    switch (step.module) {
      case ModuleTag::Consistency:
        mass += 1.0 + (ballot.empty() ? 0.0 : config.tau1);
        break;
      case ModuleTag::Reflection:
        mass += config.tau2 * static_cast<double>(reflected_answers.size()) /
                static_cast<double>(config.reflection_samples);
        break;
      case ModuleTag::Check:
        mass += config.tau3;
        break;
      case ModuleTag::Expert:
        break;
    }
  }
  return mass;
}

std::optional<std::string> noised_image_for(const QuestionRecord& record, const RunConfig& config) {
  if (record.noised_image) return record.noised_image;
  if (record.image.empty() || !std::filesystem::exists(record.image)) return std::nullopt;
  RasterImage image;
  try {
    image = read_pnm_file(record.image);
  } catch (const Error&) {
    return std::nullopt;
  }
  SaliencyMap saliency = uniform_saliency(image.width, image.height);
  if (record.saliency) saliency = saliency_from_image(read_pnm_file(*record.saliency));
  const std::uint64_t seed = question_seed(config, record.id);
  char name[64];
  std::snprintf(name, sizeof name, "%016llx.%s", static_cast<unsigned long long>(splitmix64(seed)),
                image.channels == 3 ? "ppm" : "pgm");
  const auto dir = std::filesystem::temp_directory_path() / "catts-noised";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  write_pnm_file(apply_noise(image, saliency, config.noise_sigma, seed, Exec::Serial), path);
  return path.string();
}

namespace {

class QuestionRun {
 public:
  QuestionRun(const QuestionRecord& record, const RunConfig& config, const Backends& backends,
              const PromptLibrary& prompts)
      : record_(record),
        config_(config),
        backends_(backends),
        prompts_(prompts),
        spec_(config.answer_pattern),
        seed_(question_seed(config, record.id)) {
    trace_.question_id = record.id;
    trace_.condition = record.condition;
    trace_.tags = record.tags;
    trace_.ground_truth = record.ground_truth;
  }

  TraceRecord run() {
    try {
      timed("plan", [&] { schedule(); });
      for (const ModuleTag tag : trace_.schedule) {
        ModuleStep step;
        step.module = tag;
        timed(std::string(to_string(tag)), [&] {
          switch (tag) {
            case ModuleTag::Consistency: consistency(step); break;
            case ModuleTag::Reflection: reflection(step); break;
            case ModuleTag::Check: check(step); break;
            case ModuleTag::Expert: break;
          }
        });
        step.tally = trace_.tally.scores();
        step.mass = trace_.tally.mass();
        trace_.steps.push_back(std::move(step));
      }
      if (trace_.tally.empty()) throw Error(Errc::EmptyTally, "no module contributed to the tally");
      trace_.final_answer = final_answer(trace_.tally);
      trace_.final_certainty = trace_.tally.score(trace_.final_answer) / trace_.tally.mass();
      trace_.correct = answers_match(trace_.final_answer, record_.ground_truth);
    } catch (const std::exception& e) {
      trace_.error = e.what();
      log_warning(record_.id + ": " + e.what());
    }
    return std::move(trace_);
  }

 private:
  template <class F>
  void timed(const std::string& key, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    body();
    if (config_.record_timings) {
      trace_.timings_ms[key] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  }

  void warn(std::string message) {
    log_warning(record_.id + ": " + message);
    trace_.warnings.push_back(std::move(message));
  }

  std::vector<std::string> images() const {
    return record_.image.empty() ? std::vector<std::string>{} : std::vector<std::string>{record_.image};
  }

  std::string choices_line() const {
    if (record_.choices.empty()) return "";
    std::string out = "Choices:";
    for (const auto& c : record_.choices) out += "\n- " + c;
    return out;
  }

  ExpertContext expert_context(std::string_view role) const {
    ExpertContext ctx;
    ctx.question_id = record_.id;
    ctx.images = images();
    ctx.question = record_.question;
    ctx.sampling.temperature = config_.expert_temperature;
    ctx.sampling.top_k = config_.top_k;
    ctx.sampling.max_tokens = config_.max_tokens;
    ctx.sampling.seed = splitmix64(seed_ ^ fnv1a64(role));
    ctx.max_retries = config_.expert_retries;
    return ctx;
  }

  SamplingParams sampling(std::uint64_t seed) const {
    return {config_.temperature, config_.top_k, config_.max_tokens, seed, config_.logprob_depth};
  }

  void adopt(const std::vector<std::string>& warnings) {
    trace_.warnings.insert(trace_.warnings.end(), warnings.begin(), warnings.end());
  }

  void schedule() {
    if (config_.schedule) {
      trace_.schedule = *config_.schedule;
    } else if (config_.enable_planner && backends_.expert) {
      PlanOutcome p = plan(*backends_.expert, prompts_, expert_context("planner"));
      trace_.schedule = p.schedule;
      trace_.planner_fallback = p.fallback;
      adopt(p.warnings);
    } else {
      trace_.schedule = kDefaultSchedule;
    }
  }

  /// Draws the n samples on first use.
  const std::vector<WeightedSample>& samples() {
    if (drawn_) return voters_;
    drawn_ = true;
    GenerationRequest proto;
    proto.images = images();
    proto.prompt = render(prompts_.get(Role::Solver),
                          {{"question", record_.question}, {"choices", choices_line()}});
    proto.sampling = sampling(seed_);
    proto.route = {record_.id, "original", 0, {}};
    const auto results = generate_many(*backends_.base, proto, config_.n, seed_, config_.max_inflight);
    for (const auto& r : results) {
      SampleRecord s;
      s.answer = r.trace.answer ? r.trace.answer : extract_answer(r.trace.text, spec_);
      const auto summary = aggregate(r.trace, config_.aggregation, static_cast<std::size_t>(config_.logprob_depth));
      s.nmlp = summary.nmlp;
      s.certainty = summary.certainty;
      if (s.answer) {
        voters_.push_back({*s.answer, s.certainty});
        if (std::find(trace_.candidates.begin(), trace_.candidates.end(), *s.answer) ==
            trace_.candidates.end()) {
          trace_.candidates.push_back(*s.answer);
        }
      }
      trace_.samples.push_back(std::move(s));
    }
    if (voters_.size() < results.size()) {
      warn(std::to_string(results.size() - voters_.size()) + " of " + std::to_string(results.size()) +
           " samples had no extractable answer");
    }
    return voters_;
  }

  void consistency(ModuleStep& step) {
    if (!config_.enable_consistency) return skip(step, "disabled");
    const auto& ws = samples();
    if (ws.empty()) return skip(step, "no sample produced an answer");
    VoteTally t = normalize(internal_vote(ws));
    if (config_.enable_voter && config_.tau1 > 0.0 && backends_.expert) {
      BallotOutcome b = vote(*backends_.expert, prompts_, expert_context("voter"), trace_.candidates);
      adopt(b.warnings);
      trace_.ballot = b.ballot;
      trace_.ballot_fallback = b.fallback;
      t = merge_expert(t, trace_.ballot, config_.tau1);
    }
    trace_.tally.absorb(t);
    step.ran = true;
  }

  void reflection(ModuleStep& step) {
    if (!config_.enable_reflection) return skip(step, "disabled");
    if (config_.tau2 == 0.0) return skip(step, "weight is zero");
    if (!backends_.expert) return skip(step, "no expert backend");
    const auto& ws = samples();
    if (ws.empty()) return skip(step, "no initial answer");
    const VoteTally initial = normalize(internal_vote(ws));
    trace_.initial_answer = final_answer(initial);
    trace_.initial_certainty = initial.score(*trace_.initial_answer);
    if (config_.reflection_gate && *trace_.initial_certainty >= *config_.reflection_gate) {
      return skip(step, "initial certainty above gate");
    }
    try {
      CritiqueOutcome c = critique(*backends_.expert, prompts_, expert_context("critic"),
                                   *trace_.initial_answer, *trace_.initial_certainty);
      adopt(c.warnings);
      trace_.critique = c.text;
    } catch (const Error& e) {
      if (e.code() != Errc::CritiqueUnavailable) throw;
      warn(std::string("reflection skipped: ") + e.what());
      return skip(step, "critique unavailable");
    }

    GenerationRequest req;
    req.images = images();
    req.prompt = render(prompts_.get(Role::Reviser), {{"question", record_.question},
                                                      {"choices", choices_line()},
                                                      {"initial_answer", *trace_.initial_answer},
                                                      {"critique", *trace_.critique}});
    req.sampling = sampling(splitmix64(seed_ ^ fnv1a64("reflected")));
    req.route = {record_.id, "reflected", 0, {}};
    const auto results = generate_many(*backends_.base, req, config_.reflection_samples, req.sampling.seed,
                                       config_.max_inflight);
    const double share = config_.tau2 / static_cast<double>(config_.reflection_samples);
    for (const auto& r : results) {
      auto answer = r.trace.answer ? r.trace.answer : extract_answer(r.trace.text, spec_);
      if (!answer) {
        warn("a reflected answer could not be extracted");
        continue;
      }
      trace_.reflected_answers.push_back(*answer);
      trace_.tally = add_weighted(trace_.tally, *answer, share, ModuleTag::Reflection);
    }
    if (trace_.reflected_answers.empty()) return skip(step, "no reflected answer");
    step.ran = true;
  }

  void check(ModuleStep& step) {
    if (!config_.enable_check) return skip(step, "disabled");
    if (config_.tau3 == 0.0) return skip(step, "weight is zero");
    samples();
    if (trace_.candidates.empty()) return skip(step, "no candidates");

    const std::string prompt = render(prompts_.get(Role::Solver),
                                      {{"question", record_.question}, {"choices", choices_line()}});
    ScoreRequest orig{images(), prompt, trace_.candidates, {record_.id, "original", 0, {}}};
    ScoreRequest noised = orig;
    noised.route.condition = "noised";
    noised.images.clear();
    if (const auto path = noised_image_for(record_, config_)) noised.images.push_back(*path);

    CandidateScores scores{trace_.candidates, backends_.base->score_candidates(orig),
                           backends_.base->score_candidates(noised)};
    const VcdChoice choice = vcd_select(scores, config_.vcd_alpha, config_.vcd_beta);
    trace_.vcd = VcdRecord{scores.candidates,
                           scores.orig_logp,
                           scores.noised_logp,
                           contrastive_scores(scores, config_.vcd_alpha),
                           plausibility_mask(candidate_probs(scores), config_.vcd_beta),
                           choice.answer};
    trace_.tally = add_weighted(trace_.tally, choice.answer, config_.tau3, ModuleTag::Check);
    step.ran = true;
  }

  void skip(ModuleStep& step, std::string why) { step.note = std::move(why); }

  const QuestionRecord& record_;
  const RunConfig& config_;
  const Backends& backends_;
  const PromptLibrary& prompts_;
  FormatSpec spec_;
  std::uint64_t seed_;
  TraceRecord trace_;
  bool drawn_ = false;
  std::vector<WeightedSample> voters_;
};

json tally_to_json(const std::map<std::string, double>& scores) {
  json out = json::object();
  for (const auto& [k, v] : scores) out[k] = v;
  return out;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

TraceRecord run_question(const QuestionRecord& record, const RunConfig& config, const Backends& backends,
                         const PromptLibrary& prompts) {
  if (!backends.base) throw Error(Errc::Config, "no base backend");
  return QuestionRun(record, config, backends, prompts).run();
}

json to_json(const TraceRecord& t) {
  json samples = json::array();
  for (const auto& s : t.samples) {
    samples.push_back({{"answer", optional_json(s.answer)}, {"nmlp", s.nmlp}, {"certainty", s.certainty}});
  }
  json ballot = json::array();
  for (const auto& b : t.ballot) ballot.push_back({{"candidate", b.candidate}, {"confidence", b.confidence}});
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"module", std::string(to_string(s.module))},
                     {"ran", s.ran},
                     {"note", s.note},
                     {"tally", tally_to_json(s.tally)},
                     {"mass", s.mass}});
  }
  json provenance = json::array();
  for (const auto& p : t.tally.provenance()) {
    provenance.push_back({{"module", std::string(to_string(p.tag))}, {"candidate", p.candidate}, {"delta", p.delta}});
  }
  json vcd = nullptr;
  if (t.vcd) {
    vcd = {{"candidates", t.vcd->candidates},   {"orig_logp", t.vcd->orig_logp},
           {"noised_logp", t.vcd->noised_logp}, {"contrastive", t.vcd->contrastive},
           {"plausible", t.vcd->plausible},     {"answer", t.vcd->answer}};
  }
  json schedule = json::array();
  for (const auto tag : t.schedule) schedule.push_back(std::string(to_string(tag)));
  json out = {
      {"schema_version", kTraceSchemaVersion},
      {"question_id", t.question_id},
      {"condition", t.condition},
      {"tags", t.tags},
      {"schedule", schedule},
      {"planner_fallback", t.planner_fallback},
      {"samples", samples},
      {"candidates", t.candidates},
      {"ballot", ballot},
      {"ballot_fallback", t.ballot_fallback},
      {"initial_answer", optional_json(t.initial_answer)},
      {"initial_certainty", optional_json(t.initial_certainty)},
      {"critique", optional_json(t.critique)},
      {"reflected_answers", t.reflected_answers},
      {"vcd", vcd},
      {"steps", steps},
      {"tally", {{"scores", tally_to_json(t.tally.scores())}, {"provenance", provenance}}},
      {"final_answer", t.final_answer},
      {"final_certainty", t.final_certainty},
      {"ground_truth", t.ground_truth},
      {"correct", t.correct},
      {"warnings", t.warnings},
      {"error", optional_json(t.error)},
  };
  if (!t.timings_ms.empty()) out["timings_ms"] = t.timings_ms;
  return out;
}

TraceRecord trace_from_json(const json& doc) {
  try {
    if (doc.at("schema_version").get<int>() != kTraceSchemaVersion) {
      throw Error(Errc::SchemaViolation, "unsupported trace schema version");
    }
    TraceRecord t;
    t.question_id = doc.at("question_id").get<std::string>();
    t.condition = doc.at("condition").get<std::string>();
    t.tags = doc.at("tags").get<std::vector<std::string>>();
    for (const auto& tag : doc.at("schedule")) t.schedule.push_back(parse_module_tag(tag.get<std::string>()));
    t.planner_fallback = doc.at("planner_fallback").get<bool>();
    for (const auto& s : doc.at("samples")) {
      t.samples.push_back({optional_from<std::string>(s, "answer"), s.at("nmlp").get<double>(),
                           s.at("certainty").get<double>()});
    }
    t.candidates = doc.at("candidates").get<std::vector<std::string>>();
    for (const auto& b : doc.at("ballot")) {
      t.ballot.push_back({b.at("candidate").get<std::string>(), b.at("confidence").get<double>()});
    }
    t.ballot_fallback = doc.at("ballot_fallback").get<bool>();
    t.initial_answer = optional_from<std::string>(doc, "initial_answer");
    t.initial_certainty = optional_from<double>(doc, "initial_certainty");
    t.critique = optional_from<std::string>(doc, "critique");
    t.reflected_answers = doc.at("reflected_answers").get<std::vector<std::string>>();
    if (const auto& v = doc.at("vcd"); !v.is_null()) {
      t.vcd = VcdRecord{v.at("candidates").get<std::vector<std::string>>(),
                        v.at("orig_logp").get<std::vector<double>>(),
                        v.at("noised_logp").get<std::vector<double>>(),
                        v.at("contrastive").get<std::vector<double>>(),
                        v.at("plausible").get<std::vector<bool>>(),
                        v.at("answer").get<std::string>()};
    }
    for (const auto& s : doc.at("steps")) {
      t.steps.push_back({parse_module_tag(s.at("module").get<std::string>()), s.at("ran").get<bool>(),
                         s.at("note").get<std::string>(), s.at("tally").get<std::map<std::string, double>>(),
                         s.at("mass").get<double>()});
    }
    std::vector<ProvenanceEntry> provenance;
    for (const auto& p : doc.at("tally").at("provenance")) {
      provenance.push_back({parse_module_tag(p.at("module").get<std::string>()),
                            p.at("candidate").get<std::string>(), p.at("delta").get<double>()});
    }
    t.tally = VoteTally::restore(doc.at("tally").at("scores").get<std::map<std::string, double>>(),
                                 std::move(provenance));
    t.final_answer = doc.at("final_answer").get<std::string>();
    t.final_certainty = doc.at("final_certainty").get<double>();
    t.ground_truth = doc.at("ground_truth").get<std::string>();
    t.correct = doc.at("correct").get<bool>();
    t.warnings = doc.at("warnings").get<std::vector<std::string>>();
    t.error = optional_from<std::string>(doc, "error");
    if (doc.contains("timings_ms")) t.timings_ms = doc.at("timings_ms").get<std::map<std::string, double>>();
    return t;
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaViolation, std::string("trace record: ") + e.what());
  }
}

}  // namespace catts
