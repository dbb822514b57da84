// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Answer envelopes: locating "Answer: X" in generated text, and canonical
// comparison of answers against ground truth.

#include <optional>
#include <regex>
#include <string>
#include <string_view>

namespace catts {

/// The answer-envelope pattern. Capture group 1, when present, is the answer.
class FormatSpec {
 public:
  static constexpr std::string_view kDefaultPattern =
      R"(Answer:[ \t]*([^\s](?:[^\n]*[^\s])?))";

  FormatSpec();
  explicit FormatSpec(std::string pattern);  // throws BadPattern

  const std::string& pattern() const noexcept { return pattern_; }
  const std::regex& regex() const noexcept { return regex_; }

 private:
  std::string pattern_;
  std::regex regex_;
};

/// Case-folded (ASCII), whitespace-collapsed, trimmed.
std::string canonicalize(std::string_view text);

/// The answer in the last envelope of `text`, if any.
std::optional<std::string> extract_answer(const std::string& text, const FormatSpec& spec);

/// Canonical equality, used for end-to-end correctness.
bool answers_match(std::string_view answer, std::string_view ground_truth);

}  // namespace catts
