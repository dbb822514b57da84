// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The CA-TTS Authors

#include "catts/prompts.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <regex>
#include <sstream>

#include "catts/error.hpp"

namespace catts {

namespace {

constexpr std::array<std::pair<Role, std::string_view>, 5> kRoleNames{{
    {Role::Planner, "planner"},
    {Role::Voter, "voter"},
    {Role::Critic, "critic"},
    {Role::Solver, "solver"},
    {Role::Reviser, "reviser"},
}};

const std::regex& placeholder_regex() {
  static const std::regex re(R"(\{\{([A-Za-z0-9_]+)\}\})");
  return re;
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unknown";
}

Role parse_role(std::string_view text) {
  for (const auto& [r, name] : kRoleNames) {
    if (name == text) return r;
  }
  throw Error(Errc::Config, "unknown prompt role '" + std::string(text) + "'");
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  for (std::sregex_iterator it(text.begin(), text.end(), placeholder_regex()), end; it != end; ++it) {
    std::string name = (*it)[1].str();
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
  }
  return names;
}

std::string render(const PromptTemplate& tmpl, const PromptVariables& vars) {
  std::string out;
  out.reserve(tmpl.text.size());
  auto tail = tmpl.text.cbegin();
  for (std::sregex_iterator it(tmpl.text.begin(), tmpl.text.end(), placeholder_regex()), end;
       it != end; ++it) {
    const auto& m = *it;
    const auto found = vars.find(m[1].str());
    if (found == vars.end()) {
      throw Error(Errc::UnboundPlaceholder, "'" + m[1].str() + "' in " +
                                                std::string(to_string(tmpl.role)) + " template");
    }
    out.append(tail, m[0].first);
    out += found->second;
    tail = m[0].second;
  }
  out.append(tail, tmpl.text.cend());
  return out;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir, std::string_view version) {
  PromptLibrary lib;
  for (const auto& [role, name] : kRoleNames) {
    const auto path = dir / (std::string(name) + "_" + std::string(version) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read prompt " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    lib.templates_[role] = PromptTemplate{role, std::string(version), text.str()};
  }
  return lib;
}

const PromptLibrary& PromptLibrary::bundled() {
  static const PromptLibrary lib = load(std::filesystem::path(CATTS_SOURCE_DIR) / "prompts");
  return lib;
}

const PromptTemplate& PromptLibrary::get(Role role) const {
  const auto it = templates_.find(role);
  if (it == templates_.end()) {
    throw Error(Errc::Config, "no template for role " + std::string(to_string(role)));
  }
  return it->second;
}

void PromptLibrary::set(PromptTemplate tmpl) { templates_[tmpl.role] = std::move(tmpl); }

}  // namespace catts
