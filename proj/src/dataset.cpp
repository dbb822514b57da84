// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "catts/answer.hpp"
#include "catts/error.hpp"

namespace catts {

using nlohmann::json;

namespace {

std::string text_field(const json& doc, const char* key, bool required) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) {
    if (required) throw Error(Errc::Dataset, std::string("missing '") + key + "'");
    return {};
  }
  if (!it->is_string()) throw Error(Errc::Dataset, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> text_list(const json& doc, const char* key) {
  std::vector<std::string> out;
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return out;
  if (!it->is_array()) throw Error(Errc::Dataset, std::string("'") + key + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(Errc::Dataset, std::string("'") + key + "' entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string resolve(const std::string& p, const std::filesystem::path& base_dir) {
  if (p.empty() || base_dir.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (base_dir / p).lexically_normal().string();
}

}  // namespace

QuestionRecord record_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw Error(Errc::Dataset, "record must be a JSON object");
  static const std::set<std::string> known{"id", "question", "choices", "ground_truth", "image",
                                           "noised_image", "saliency", "condition", "tags"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw Error(Errc::Dataset, "unknown field '" + key + "'");
  }
  QuestionRecord r;
  r.id = text_field(doc, "id", true);
  if (r.id.empty()) throw Error(Errc::Dataset, "'id' is empty");
  r.question = text_field(doc, "question", true);
  r.choices = text_list(doc, "choices");
  r.ground_truth = text_field(doc, "ground_truth", true);
  if (r.ground_truth.empty()) throw Error(Errc::Dataset, "'ground_truth' is empty");
  r.image = resolve(text_field(doc, "image", false), base_dir);
  if (const auto v = text_field(doc, "noised_image", false); !v.empty()) r.noised_image = resolve(v, base_dir);
  if (const auto v = text_field(doc, "saliency", false); !v.empty()) r.saliency = resolve(v, base_dir);
  if (const auto v = text_field(doc, "condition", false); !v.empty()) r.condition = v;
  r.tags = text_list(doc, "tags");
  if (!r.choices.empty() &&
      std::none_of(r.choices.begin(), r.choices.end(),
                   [&](const std::string& c) { return answers_match(c, r.ground_truth); })) {
    throw Error(Errc::Dataset, "ground truth '" + r.ground_truth + "' is not among the choices");
  }
  return r;
}

DatasetLoad load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read dataset " + path.string());
  DatasetLoad out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      out.errors.push_back(where + "not valid JSON");
      continue;
    }
    try {
      QuestionRecord r = record_from_json(doc, path.parent_path());
      if (!seen.insert(r.id).second) throw Error(Errc::Dataset, "duplicate id '" + r.id + "'");
      out.records.push_back(std::move(r));
    } catch (const Error& e) {
      out.errors.push_back(where + e.what());
    }
  }
  return out;
}

}  // namespace catts
