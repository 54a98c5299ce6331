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

#ifndef OPFUZZ_CONSTRAINT_TREE_H_
#define OPFUZZ_CONSTRAINT_TREE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/constraint_expr.h"

namespace opfuzz {

struct Quantifier {
  std::string var;
  ExprPtr lo;
  ExprPtr hi;  // exclusive
};

struct Constraint {
  ExprPtr pred;  // null when unliftable
  std::optional<Quantifier> forall;
  bool unliftable = false;
  std::string opaque;  // IR rendering of an unliftable guard
  int block = -1;      // provenance: the sink block

  std::string Print() const;
};

struct Branch;

struct TreeNode {
  std::vector<Constraint> constraints;
  std::vector<Branch> branches;

  bool empty() const;
  // Appends unless a structurally identical constraint is present.
  void AddConstraint(Constraint c);
  // Returns the branch guarded by `cond`, creating it when absent.
  TreeNode &BranchFor(const ExprPtr &cond, int block);
};

struct Branch {
  ExprPtr cond;
  int block = -1;
  TreeNode body;
};

struct ConstraintTree {
  std::string op;
  TreeNode root;
  // Loops with mixed bodies that were skipped during extraction.
  std::vector<std::string> omissions;
};

// One constraint per line, two spaces of indentation per depth. Branch lines
// read `branch: cond`; their constraints follow one level deeper.
std::string Serialize(const TreeNode &root);
TreeNode ParseTree(std::string_view text, const std::string &file);

// Order-insensitive rendering: constraints and branches sorted per node. Two
// trees are equal as constraint sets iff their canonical texts match.
std::string CanonicalText(const TreeNode &root);

// A root-to-leaf path: the guards assumed true and the constraints in force.
struct TreePath {
  std::vector<ExprPtr> guards;
  std::vector<const Constraint *> constraints;
  std::string Label() const;
};

// Logical nodes are formed by pairing a branch `c` with its sibling `!(c)`;
// each logical node contributes a binary choice. Paths enumerate the product
// of those choices in a fixed order. `limit` caps the count.
std::vector<TreePath> EnumeratePaths(const TreeNode &root, size_t limit = 64);

// Number of constraints (including unliftable ones) and branch guards.
size_t CountConstraints(const TreeNode &node);
size_t CountBranches(const TreeNode &node);

}  // namespace opfuzz

#endif  // OPFUZZ_CONSTRAINT_TREE_H_
