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

#ifndef OPFUZZ_ENTITY_H_
#define OPFUZZ_ENTITY_H_

#include <map>
#include <set>
#include <string>
#include <vector>

namespace opfuzz {

// CamelCase word segmentation: "StackPush" -> {Stack, Push},
// "BTCBFSKernel" -> {BTCBFS, Kernel}.
std::vector<std::string> SplitCamel(const std::string &name);

// Verbs known without corpus evidence.
const std::set<std::string> &VerbLexicon();

struct EntityGroup {
  std::string entity;
  std::map<std::string, std::string> verbs;  // member op -> verb tokens (joined)
  std::vector<std::vector<std::string>> sequences;
};

// A token is a verb when it is in the lexicon or appears in non-leading
// position in at least two distinct names. The entity is the concatenation
// of the remaining tokens. Groups come back sorted by entity.
std::vector<EntityGroup> ClusterEntities(const std::vector<std::string> &op_names);

// Attaches each known sequence to the group containing all of its members.
void AttachSequences(std::vector<EntityGroup> &groups,
                     const std::vector<std::vector<std::string>> &sequences);

const EntityGroup *GroupOf(const std::vector<EntityGroup> &groups, const std::string &op);

}  // namespace opfuzz

#endif  // OPFUZZ_ENTITY_H_
