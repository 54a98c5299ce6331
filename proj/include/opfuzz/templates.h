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

#ifndef OPFUZZ_TEMPLATES_H_
#define OPFUZZ_TEMPLATES_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opfuzz/constraint_tree.h"
#include "opfuzz/corpus.h"
#include "opfuzz/entity.h"
#include "opfuzz/registry.h"

namespace opfuzz {

// Execution environment of one operator.
struct ControlTemplate {
  std::string op;
  std::vector<ExecMode> modes;
  std::string kernel_group;
  std::map<std::string, std::string> file_fixtures;  // file param -> fixture name
  std::map<std::string, std::string> producers;      // resource param -> producer op
  std::string entity;
  // Known operation sequence containing the operator, and its position.
  std::vector<std::string> sequence;
  int position = -1;
  bool unfillable = false;
  std::string reason;
};

ControlTemplate BuildControlTemplate(const OpSpec &spec, const Registry &registry,
                                     const std::vector<EntityGroup> &groups,
                                     const TestScript *script,
                                     const std::vector<ExecMode> &modes);

// What a fact constrains about its parameter.
enum class Subject { kNdim, kSize, kDim, kVal, kAttr, kDType };

// `subject op rhs`, or `subject % rhs == 0` when multiple_of is set. `rhs`
// only references parameters earlier in generation order, except that an
// element fact may read lower-offset elements of its own tensor.
struct Fact {
  Subject subject = Subject::kAttr;
  int64_t axis = -1;           // kDim
  std::vector<int64_t> index;  // kVal
  bool all = false;            // every axis / every element
  CmpOp op = CmpOp::kEq;
  ExprPtr rhs;
  bool multiple_of = false;

  std::string Print() const;
};

// Alternatives of a disjunction; one is picked per generated input.
using FactChoice = std::vector<std::vector<Fact>>;

struct Slot {
  ParamDecl decl;
  std::string symbol;  // DI, DF, DS, DB, H or FILE
  std::vector<DType> dtypes;
  std::vector<Fact> facts;
  std::vector<FactChoice> choices;

  std::string Print() const;
};

struct DataTemplate {
  std::string op;
  std::string label;  // path label
  std::vector<ExprPtr> guards;
  std::vector<Constraint> constraints;  // every constraint on the path
  std::vector<std::string> order;       // generation order
  std::vector<Slot> slots;              // in generation order
  bool rejected = false;
  std::string reason;

  const Slot *FindSlot(const std::string &param) const;
  int OrderOf(const std::string &param) const;
};

// Builds the template for one root-to-leaf path. Contradictory literal facts
// on the path mark the template rejected.
DataTemplate BuildDataTemplate(const OpSpec &spec, const TreeNode &tree, const TreePath &path,
                               const std::vector<std::string> &order);

// One template per path of the tree, in EnumeratePaths order.
std::vector<DataTemplate> BuildDataTemplates(const OpSpec &spec, const TreeNode &tree);

// Tree-style text: guards as nested `branch:` lines, then `slot:` lines and
// the path's constraints.
std::string SerializeTemplate(const DataTemplate &t);

}  // namespace opfuzz

#endif  // OPFUZZ_TEMPLATES_H_
