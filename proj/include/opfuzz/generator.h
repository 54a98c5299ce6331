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

#ifndef OPFUZZ_GENERATOR_H_
#define OPFUZZ_GENERATOR_H_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/templates.h"
#include "opfuzz/tensor.h"

namespace opfuzz {

// Thin wrapper so draws do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  uint64_t Next() { return eng_(); }
  uint64_t Below(uint64_t n) { return n == 0 ? 0 : eng_() % n; }
  // Inclusive; any bounds, including the full int64 range.
  int64_t Range(int64_t lo, int64_t hi);
  bool Chance(double p) { return static_cast<double>(eng_() >> 11) * 0x1.0p-53 < p; }
  template <class T>
  const T &Pick(const std::vector<T> &v) { return v[Below(v.size())]; }

 private:
  std::mt19937_64 eng_;
};

uint64_t Fnv1a(std::string_view s);
// Derives an independent stream seed (splitmix64 finalizer).
uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b = 0);

// S = {0, 1, -1, 2, 7, 2^20, 2^31-1, 2147483649, -(2^31)}.
const std::vector<int64_t> &SpecialInts();

// Builds one input from a data template. Values in `pinned` are used as
// given (resource handles, caller-fixed attrs). The result has provenance
// guided when it satisfies the path outright, repaired when repair fixed it,
// and random when repair gave up.
TestInput GenerateInput(const DataTemplate &t, const ControlTemplate &ctrl, uint64_t seed,
                        const std::map<std::string, ParamValue> &pinned = {});

struct RepairResult {
  TestInput input;
  int passes = 0;
  bool fixpoint = false;  // every path constraint holds
};

// Walks violated constraints in generation order for at most 8 passes. A
// move is kept only if it fixes its target without breaking a constraint that
// held before it and sits no later in generation order; a move that breaks
// exactly one such constraint may be paired with one edit restoring it.
// Never changes a dtype.
RepairResult RepairInput(const TestInput &in, const DataTemplate &t);

// Constraint-blind baseline: ranks 0-4, extents 0-8, full-range integers,
// strings of length 0-16, declared dtypes only.
TestInput GenerateRandom(const OpSpec &spec, uint64_t seed);

// Moves that flip `c` to false while leaving the rest alone where possible;
// used for boundary probes of a single check. Empty when no move applies.
std::vector<TestInput> ViolationMoves(const Constraint &c, const TestInput &in);

}  // namespace opfuzz

#endif  // OPFUZZ_GENERATOR_H_
