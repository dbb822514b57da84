// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "catts/error.hpp"
#include "catts/parallel.hpp"

namespace catts {

using nlohmann::json;

namespace {

json report_json(const CalibrationReport& r) {
  return {{"count", r.count},
          {"accuracy", r.accuracy},
          {"mean_certainty", r.mean_certainty},
          {"ece", r.ece},
          {"auroc", r.auroc ? json(*r.auroc) : json(nullptr)},
          {"confidence_drop", r.confidence_drop ? json(*r.confidence_drop) : json(nullptr)}};
}

std::string canonical_condition(const std::string& c) {
  return c == "original" ? std::string("origin") : c;
}

OutcomeRecord outcome(const TraceRecord& t) {
  // Failed runs have no certainty; they enter as the least certain wrong answer.
  const double c = t.error ? 1e-12 : std::clamp(t.final_certainty, 1e-12, 1.0);
  return {c, t.correct, parse_condition(canonical_condition(t.condition))};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

Backends open_backends(const RunConfig& config) {
  if (config.backend.empty()) throw Error(Errc::Config, "no backend configured");
  Backends b;
  b.base = open_backend(config.backend);
  b.expert = config.expert_backend.empty() || config.expert_backend == config.backend
                 ? b.base
                 : open_backend(config.expert_backend);
  return b;
}

PromptLibrary open_prompts(const RunConfig& config) {
  return config.prompts_dir.empty() ? PromptLibrary::bundled() : PromptLibrary::load(config.prompts_dir);
}

std::vector<TraceRecord> run_records(const std::vector<QuestionRecord>& records, const RunConfig& config,
                                     const Backends& backends, const PromptLibrary& prompts) {
  validate(config);
  std::vector<TraceRecord> traces(records.size());
  const Exec exec = config.max_inflight > 1 ? Exec::Parallel : Exec::Serial;
  for_each_index(
      records.size(), exec,
      [&](std::size_t i) { traces[i] = run_question(records[i], config, backends, prompts); },
      static_cast<int>(config.max_inflight));
  return traces;
}

DatasetSummary summarize(const std::vector<TraceRecord>& traces, std::size_t ece_bins) {
  DatasetSummary s;
  s.records = traces.size();
  std::vector<OutcomeRecord> outcomes;
  std::size_t correct = 0;
  for (const auto& t : traces) {
    if (t.error) {
      ++s.failed;
      s.errors.push_back(t.question_id + ": " + *t.error);
    }
    correct += t.correct ? 1 : 0;
    for (const auto& tag : t.tags) {
      auto& st = s.by_tag[tag];
      st.accuracy += t.correct ? 1.0 : 0.0;
      ++st.count;
    }
    outcomes.push_back(outcome(t));
  }
  for (auto& [_, st] : s.by_tag) st.accuracy /= static_cast<double>(st.count);
  if (!traces.empty()) {
    s.accuracy = static_cast<double>(correct) / static_cast<double>(traces.size());
    s.calibration = calibration_report(outcomes, ece_bins);
  }
  return s;
}

json to_json(const DatasetSummary& s) {
  json tags = json::object();
  for (const auto& [tag, st] : s.by_tag) tags[tag] = {{"count", st.count}, {"accuracy", st.accuracy}};
  return {{"schema_version", kTraceSchemaVersion},
          {"records", s.records},
          {"skipped", s.skipped},
          {"failed", s.failed},
          {"accuracy", s.accuracy},
          {"by_tag", tags},
          {"calibration", s.calibration ? report_json(*s.calibration) : json(nullptr)},
          {"errors", s.errors}};
}

std::string traces_jsonl(const std::vector<TraceRecord>& traces) {
  std::string out;
  for (const auto& t : traces) out += to_json(t).dump() + "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

DatasetSummary run_dataset(const std::filesystem::path& dataset, const RunConfig& config,
                           const Backends& backends, const PromptLibrary& prompts,
                           const std::filesystem::path& out_dir) {
  const DatasetLoad load = load_dataset(dataset);
  if (load.records.empty()) {
    throw Error(Errc::NoRecords, dataset.string() + " holds no usable record");
  }
  const auto traces = run_records(load.records, config, backends, prompts);
  DatasetSummary s = summarize(traces, config.ece_bins);
  s.skipped = load.errors.size();
  s.errors.insert(s.errors.begin(), load.errors.begin(), load.errors.end());
  write_text(out_dir / "traces.jsonl", traces_jsonl(traces));
  write_text(out_dir / "summary.json", to_json(s).dump(2) + "\n");
  return s;
}

std::optional<std::string> majority_answer(const std::vector<SampleRecord>& samples) {
  std::vector<WeightedSample> votes;
  for (const auto& s : samples) {
    if (s.answer) votes.push_back({*s.answer, 1.0});
  }
  if (votes.empty()) return std::nullopt;
  return final_answer(internal_vote(votes));
}

std::optional<std::string> filtered_answer(const std::vector<SampleRecord>& samples, double keep) {
  std::vector<SampleRecord> answered;
  for (const auto& s : samples) {
    if (s.answer) answered.push_back(s);
  }
  if (answered.empty()) return std::nullopt;
  const auto k = static_cast<std::size_t>(std::ceil(keep * static_cast<double>(answered.size()) - 1e-12));
  std::stable_sort(answered.begin(), answered.end(),
                   [](const SampleRecord& a, const SampleRecord& b) { return a.certainty > b.certainty; });
  answered.resize(std::max<std::size_t>(1, k));
  return majority_answer(answered);
}

ScalingResult run_scaling(const std::vector<QuestionRecord>& records, const RunConfig& config,
                          const Backends& backends, const PromptLibrary& prompts,
                          const std::vector<std::size_t>& sizes) {
  if (records.empty()) throw Error(Errc::NoRecords, "scaling needs at least one record");
  if (sizes.empty()) throw Error(Errc::Config, "no sample sizes given");
  ScalingResult result;
  const std::vector<std::string> methods{"ca-tts", "majority", "certainty-filtered"};
  std::map<std::string, std::vector<ScalingPoint>> points;
  for (const std::size_t n : sizes) {
    RunConfig cfg = config;
    cfg.n = n;
    const auto traces = run_records(records, cfg, backends, prompts);
    std::map<std::string, std::size_t> correct;
    for (const auto& t : traces) {
      if (t.correct) ++correct["ca-tts"];
      const auto m = majority_answer(t.samples);
      if (m && answers_match(*m, t.ground_truth)) ++correct["majority"];
      const auto f = filtered_answer(t.samples, config.filter_keep);
      if (f && answers_match(*f, t.ground_truth)) ++correct["certainty-filtered"];
    }
    for (const auto& method : methods) {
      const double acc = 100.0 * static_cast<double>(correct[method]) / static_cast<double>(traces.size());
      result.rows.push_back({method, n, acc});
      points[method].push_back({static_cast<int>(n), acc});
    }
  }
  for (const auto& method : methods) {
    std::optional<SlopeFit> fit;
    try {
      fit = scaling_slope(points[method]);
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateDesign && e.code() != Errc::EmptyInput) throw;
    }
    result.fits[method] = fit;
  }
  return result;
}

std::string scaling_csv(const ScalingResult& result) {
  std::string out = "method,n,accuracy\n";
  for (const auto& r : result.rows) out += r.method + "," + std::to_string(r.n) + "," + fmt(r.accuracy) + "\n";
  return out;
}

json to_json(const ScalingResult& result) {
  json fits = json::object();
  for (const auto& [method, fit] : result.fits) {
    fits[method] = fit ? json{{"slope", fit->slope}, {"intercept", fit->intercept}} : json(nullptr);
  }
  json rows = json::array();
  for (const auto& r : result.rows) rows.push_back({{"method", r.method}, {"n", r.n}, {"accuracy", r.accuracy}});
  return {{"schema_version", kTraceSchemaVersion}, {"rows", rows}, {"fits", fits}};
}

std::vector<CalibrationRow> calibration_table(const std::vector<TraceRecord>& traces, std::size_t bins) {
  std::map<std::string, std::vector<OutcomeRecord>> groups;
  for (const auto& t : traces) groups[canonical_condition(t.condition)].push_back(outcome(t));
  const auto origin = groups.find("origin");
  if (origin == groups.end()) throw Error(Errc::Dataset, "no record has the origin condition");
  std::vector<CalibrationRow> rows{{"origin", calibration_report(origin->second, bins)}};
  for (const auto& [condition, records] : groups) {
    if (condition == "origin") continue;
    rows.push_back({condition, calibration_report(records, bins, origin->second)});
  }
  return rows;
}

std::string calibration_csv(const std::vector<CalibrationRow>& rows) {
  std::string out = "condition,count,accuracy,mean_certainty,cd,ece,auroc\n";
  for (const auto& r : rows) {
    const auto& x = r.report;
    out += r.condition + "," + std::to_string(x.count) + "," + fmt(x.accuracy) + "," + fmt(x.mean_certainty) +
           "," + (x.confidence_drop ? fmt(*x.confidence_drop) : "") + "," + fmt(x.ece) + "," +
           (x.auroc ? fmt(*x.auroc) : "") + "\n";
  }
  return out;
}

}  // namespace catts
