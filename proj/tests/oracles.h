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

// Independent reference implementations used by the unit and acceptance
// tests. None of them call the code paths they check.

#ifndef OPFUZZ_TESTS_ORACLES_H_
#define OPFUZZ_TESTS_ORACLES_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "opfuzz/kernel_ir.h"
#include "opfuzz/registry.h"

namespace opfuzz::oracle {

// Shortest declared path of every op, ties broken lexicographically.
std::map<std::string, std::vector<std::string>> MinimalPlacements(const std::vector<OpSpec> &specs);

// Parameters reaching each SSA value, by explicit def-use graph search.
// Tensor stores and local slots are treated as graph nodes.
std::vector<std::set<std::string>> TaintByReachability(const KernelIR &kernel);

// Blocks reachable from the entry.
std::set<int> Reachable(const KernelIR &kernel);

// Dominance by definition: a dominates b iff b is unreachable once a is
// removed from the CFG.
bool DominatesByRemoval(const KernelIR &kernel, int a, int b);

struct SoundnessResult {
  std::string kernel;
  int64_t bindings = 0;
  int64_t accepted = 0;  // tree true
  bool exhaustive = false;
  int64_t failures = 0;
  std::vector<std::string> counterexamples;  // the first few
};

// Checks `tree holds` <=> `execute does not reject` on the small domain:
// rank <= 2, extents <= 3, integers in {-1,0,1,2}. The full product is walked
// when it has at most `budget` bindings, otherwise `budget` bindings are drawn
// with a fixed seed, stratified by rank, extents and then values.
SoundnessResult CheckLiftingSoundness(const KernelIR &kernel, int64_t budget, uint64_t seed);

}  // namespace opfuzz::oracle

#endif  // OPFUZZ_TESTS_ORACLES_H_
