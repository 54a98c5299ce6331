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

#ifndef OPFUZZ_EXTRACTOR_H_
#define OPFUZZ_EXTRACTOR_H_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "opfuzz/constraint_tree.h"
#include "opfuzz/kernel_ir.h"
#include "opfuzz/registry.h"

namespace opfuzz {

using TaintSet = std::set<std::string>;

struct TaintState {
  std::vector<TaintSet> values;             // per SSA value id
  std::vector<TaintSet> slots;              // per local slot
  std::map<std::string, TaintSet> tensors;  // taint stored into each tensor param
  int passes = 0;

  bool operator==(const TaintState &o) const {
    return values == o.values && slots == o.slots && tensors == o.tensors;
  }
};

// get_input / get_attr results carry their parameter's name. Throws Error when
// a fetch names an undeclared parameter.
TaintState SeedSources(const KernelIR &kernel);
// Names of every seeded parameter.
std::set<std::string> SeededParams(const TaintState &seeds);

// One flow-insensitive transfer pass over every instruction; returns true
// when anything changed.
bool PropagateOnce(const KernelIR &kernel, TaintState &state);
// Iterates PropagateOnce to the fixpoint.
TaintState PropagateTaint(const KernelIR &kernel, TaintState seeds);

struct SinkSite {
  int block = -1;
  int instr = -1;         // index of the br within its block
  int cond = -1;          // value id of the guard
  bool pass_on_true = true;
  int fail_block = -1;
  std::string failure_kind = "require_fail";
};

std::vector<SinkSite> FindSinks(const KernelIR &kernel, const TaintState &taint);

// Immediate dominators (entry maps to itself; unreachable blocks to -1).
std::vector<int> Dominators(const KernelIR &kernel);
bool Dominates(const std::vector<int> &idom, int a, int b);

struct ExtractResult {
  TaintState taint;
  std::vector<SinkSite> sinks;
  ConstraintTree tree;
};

// Seeds, propagates, finds sinks and lifts them into a constraint tree over
// the kernel's parameter names.
ExtractResult ExtractConstraints(const KernelIR &kernel);

// Rebinds a kernel-level tree to an operator: every atom must name one of the
// operator's parameters, otherwise the constraint degrades to unliftable.
ConstraintTree LiftToSpec(const ConstraintTree &tree, const OpSpec &spec);

// How parameters reach dangerous operands, used by the causality labeler.
struct ParamRoles {
  std::set<std::string> index;      // flows into an index operand or dim axis
  std::set<std::string> divisor;    // flows into a divisor
  std::set<std::string> size_like;  // combined arithmetically with shape queries
};

ParamRoles ComputeParamRoles(const KernelIR &kernel, const TaintState &taint);

}  // namespace opfuzz

#endif  // OPFUZZ_EXTRACTOR_H_
