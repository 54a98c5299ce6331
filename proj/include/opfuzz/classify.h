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

#ifndef OPFUZZ_CLASSIFY_H_
#define OPFUZZ_CLASSIFY_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opfuzz/constraint_tree.h"
#include "opfuzz/registry.h"

namespace opfuzz {

struct ParamOrder {
  std::vector<std::string> order;
  // Dependency edges (from, to): `from` must be generated before `to`.
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> warnings;  // one per cycle broken
};

// Equalities `f(p) == g(q)` with g(q) a bare attr reference or a
// size/ndim/dim atom make p depend on q. Ties go to declaration order.
ParamOrder ToposortParams(const TreeNode &tree, const OpSpec &spec);

// Environmental and dependency counts are not visible in the trees; callers
// supply them per operator.
struct OpConstraintInput {
  std::string op;
  const TreeNode *tree = nullptr;
  int64_t environmental = 0;
  int64_t dependency = 0;
};

struct ConstraintStats {
  // environmental / dependency / validation / logical
  std::map<std::string, int64_t> by_category;
  // ndim / shape / size / value / dtype
  std::map<std::string, int64_t> single_param;
  // "attrA&attrB" with the pair sorted
  std::map<std::string, int64_t> param_pairs;
  int64_t single_param_constraints = 0;
  int64_t multi_param_constraints = 0;
  int64_t unliftable = 0;
};

ConstraintStats ClassifyConstraints(const std::vector<OpConstraintInput> &ops);

}  // namespace opfuzz

#endif  // OPFUZZ_CLASSIFY_H_
