// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace catts {

/// One line of a dataset file. Relative paths resolve against the dataset's
/// directory.
struct QuestionRecord {
  std::string id;
  std::string question;
  std::vector<std::string> choices;
  std::string ground_truth;
  std::string image;
  std::optional<std::string> noised_image;
  std::optional<std::string> saliency;
  std::string condition = "origin";
  std::vector<std::string> tags;
};

/// Throws Dataset on missing or mistyped fields.
QuestionRecord record_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

struct DatasetLoad {
  std::vector<QuestionRecord> records;
  std::vector<std::string> errors;  // "<path>:<line>: message", one per skipped line
};

/// Bad lines are reported and skipped; an unreadable file throws Io.
DatasetLoad load_dataset(const std::filesystem::path& path);

}  // namespace catts
