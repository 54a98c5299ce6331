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

#ifndef OPFUZZ_CONSTRAINT_EVAL_H_
#define OPFUZZ_CONSTRAINT_EVAL_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opfuzz/constraint_tree.h"
#include "opfuzz/tensor.h"

namespace opfuzz {

using VarEnv = std::map<std::string, int64_t>;

// Value of an expression; nullopt when an index or axis is out of range, a
// divisor is zero, or int64 arithmetic overflows. Throws Error when the
// binding lacks a referenced parameter.
std::optional<Scalar> EvalValue(const ExprPtr &e, const TestInput &in, const VarEnv &vars = {});
// Truth value; nullopt propagates from EvalValue.
std::optional<bool> EvalBool(const ExprPtr &e, const TestInput &in, const VarEnv &vars = {});

// A constraint holds when its predicate evaluates to true for every index of
// its quantifier. Undefined values count as false. Unliftable constraints are
// not checked and always hold.
bool Evaluate(const Constraint &c, const TestInput &in);
bool Evaluate(const ExprPtr &e, const TestInput &in);

// Tree semantics: every root constraint holds and each branch condition
// implies its subtree.
bool EvaluateTree(const TreeNode &root, const TestInput &in);
// All guards and all constraints of the path hold.
bool EvaluatePath(const TreePath &path, const TestInput &in);

std::vector<const Constraint *> Violations(const TreePath &path, const TestInput &in);

}  // namespace opfuzz

#endif  // OPFUZZ_CONSTRAINT_EVAL_H_
