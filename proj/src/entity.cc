// Copyright 2026 The opfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "opfuzz/entity.h"

#include <algorithm>
#include <cctype>

namespace opfuzz {

std::vector<std::string> SplitCamel(const std::string &name) {
  std::vector<std::string> out;
  std::string cur;
  auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
  auto lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
  for (size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (c == '_') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
      continue;
    }
    bool boundary = false;
    if (!cur.empty() && upper(c)) {
      char prev = name[i - 1];
      // "aB" starts a word; so does the last capital of "ABc".
      boundary = !upper(prev) || (i + 1 < name.size() && lower(name[i + 1]));
    }
    if (boundary) {
      out.push_back(cur);
      cur.clear();
    }
    cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

const std::set<std::string> &VerbLexicon() {
  static const std::set<std::string> kVerbs = {
      "New",  "Create", "Push", "Pop",   "Close", "Enqueue", "Dequeue",
      "Open", "Read",   "Write", "Delete", "Destroy", "Get",   "Set"};
  return kVerbs;
}

std::vector<EntityGroup> ClusterEntities(const std::vector<std::string> &op_names) {
  std::set<std::string> names(op_names.begin(), op_names.end());
  std::map<std::string, std::set<std::string>> trailing;  // token -> names using it non-leading
  for (const auto &n : names) {
    auto toks = SplitCamel(n);
    for (size_t i = 1; i < toks.size(); ++i) trailing[toks[i]].insert(n);
  }
  auto is_verb = [&](const std::string &t) {
    auto it = trailing.find(t);
    return VerbLexicon().count(t) || (it != trailing.end() && it->second.size() >= 2);
  };
  std::map<std::string, EntityGroup> groups;
  for (const auto &n : names) {
    std::string entity, verbs;
    for (const auto &t : SplitCamel(n)) {
      if (is_verb(t)) verbs += t;
      else entity += t;
    }
    if (entity.empty()) entity = n;
    EntityGroup &g = groups[entity];
    g.entity = entity;
    g.verbs[n] = verbs;
  }
  std::vector<EntityGroup> out;
  for (auto &[_, g] : groups) out.push_back(std::move(g));
  return out;
}

void AttachSequences(std::vector<EntityGroup> &groups,
                     const std::vector<std::vector<std::string>> &sequences) {
  for (const auto &seq : sequences) {
    for (auto &g : groups) {
      bool all = std::all_of(seq.begin(), seq.end(), [&](const std::string &op) { return g.verbs.count(op) > 0; });
      if (all && std::find(g.sequences.begin(), g.sequences.end(), seq) == g.sequences.end())
        g.sequences.push_back(seq);
    }
  }
}

const EntityGroup *GroupOf(const std::vector<EntityGroup> &groups, const std::string &op) {
  for (const auto &g : groups)
    if (g.verbs.count(op)) return &g;
  return nullptr;
}

}  // namespace opfuzz
