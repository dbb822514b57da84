// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "catts/metrics.hpp"
#include "catts/pipeline.hpp"

namespace catts {

/// Opens config.backend and config.expert_backend (the base one when empty).
Backends open_backends(const RunConfig& config);
/// config.prompts_dir, or the bundled prompts.
PromptLibrary open_prompts(const RunConfig& config);

/// Questions fan out up to config.max_inflight; results keep record order.
std::vector<TraceRecord> run_records(const std::vector<QuestionRecord>& records, const RunConfig& config,
                                     const Backends& backends, const PromptLibrary& prompts);

struct TagStats {
  std::size_t count = 0;
  double accuracy = 0.0;
};

struct DatasetSummary {
  std::size_t records = 0;
  std::size_t skipped = 0;  // dataset lines that did not parse
  std::size_t failed = 0;   // questions whose run ended in an error
  double accuracy = 0.0;    // over all parsed records; failures count as wrong
  std::map<std::string, TagStats> by_tag;
  std::optional<CalibrationReport> calibration;
  std::vector<std::string> errors;

  int exit_code() const noexcept { return skipped + failed > 0 ? 1 : 0; }
};

nlohmann::json to_json(const DatasetSummary& summary);
DatasetSummary summarize(const std::vector<TraceRecord>& traces, std::size_t ece_bins);

/// One compact JSON line per trace, in record order.
std::string traces_jsonl(const std::vector<TraceRecord>& traces);

/// Runs every record and writes traces.jsonl and summary.json into out_dir.
/// Throws NoRecords if the dataset holds no usable record.
DatasetSummary run_dataset(const std::filesystem::path& dataset, const RunConfig& config,
                           const Backends& backends, const PromptLibrary& prompts,
                           const std::filesystem::path& out_dir);

// Scaling study.

inline const std::vector<std::size_t> kScalingSizes{1, 2, 4, 8, 16, 32};

/// Unweighted mode of the sample answers; ties break lexicographically.
std::optional<std::string> majority_answer(const std::vector<SampleRecord>& samples);
/// Keeps the ⌈keep·n⌉ most certain answered samples, then takes the mode.
std::optional<std::string> filtered_answer(const std::vector<SampleRecord>& samples, double keep);

struct ScalingRow {
  std::string method;  // ca-tts, majority, certainty-filtered
  std::size_t n = 0;
  double accuracy = 0.0;  // percent
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  std::map<std::string, std::optional<SlopeFit>> fits;  // absent with fewer than two sizes
};

ScalingResult run_scaling(const std::vector<QuestionRecord>& records, const RunConfig& config,
                          const Backends& backends, const PromptLibrary& prompts,
                          const std::vector<std::size_t>& sizes = kScalingSizes);
std::string scaling_csv(const ScalingResult& result);
nlohmann::json to_json(const ScalingResult& result);

// Calibration study.

struct CalibrationRow {
  std::string condition;
  CalibrationReport report;  // confidence_drop is relative to origin, absent for origin itself
};

/// One row per condition, origin first. Throws Dataset when no record has
/// the origin condition.
std::vector<CalibrationRow> calibration_table(const std::vector<TraceRecord>& traces, std::size_t bins);
std::string calibration_csv(const std::vector<CalibrationRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace catts
