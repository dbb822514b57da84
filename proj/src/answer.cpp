// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/answer.hpp"

#include <cctype>

#include "catts/error.hpp"

namespace catts {

FormatSpec::FormatSpec() : FormatSpec(std::string(kDefaultPattern)) {}

FormatSpec::FormatSpec(std::string pattern) : pattern_(std::move(pattern)) {
  try {
    regex_ = std::regex(pattern_, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw Error(Errc::BadPattern, "'" + pattern_ + "': " + e.what());
  }
}

std::string canonicalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::optional<std::string> extract_answer(const std::string& text, const FormatSpec& spec) {
  std::optional<std::string> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), spec.regex());
       it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    found = m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
  }
  return found;
}

bool answers_match(std::string_view answer, std::string_view ground_truth) {
  return canonicalize(answer) == canonicalize(ground_truth);
}

}  // namespace catts
