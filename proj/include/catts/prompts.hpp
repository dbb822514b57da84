// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#pragma once

// Role prompt templates. Placeholders are written {{name}}; names are
// letters, digits and underscores.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace catts {

enum class Role { Planner, Voter, Critic, Solver, Reviser };

std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view text);

using PromptVariables = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
  Role role = Role::Solver;
  std::string version = "v1";
  std::string text;

  /// Distinct placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const;
};

/// Substitutes every placeholder. Extra variables are ignored.
/// Throws UnboundPlaceholder naming the first placeholder without a value.
std::string render(const PromptTemplate& tmpl, const PromptVariables& vars);

class PromptLibrary {
 public:
  /// Loads `<role>_<version>.txt` for every role from `dir`.
  static PromptLibrary load(const std::filesystem::path& dir, std::string_view version = "v1");
  /// The prompts/ directory of the source tree.
  static const PromptLibrary& bundled();

  const PromptTemplate& get(Role role) const;
  void set(PromptTemplate tmpl);

 private:
  std::map<Role, PromptTemplate> templates_;
};

}  // namespace catts
