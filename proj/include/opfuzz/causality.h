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

#ifndef OPFUZZ_CAUSALITY_H_
#define OPFUZZ_CAUSALITY_H_

#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/extractor.h"
#include "opfuzz/registry.h"
#include "opfuzz/tensor.h"

namespace opfuzz {

// Labels in rule order; the first rule that matches wins.
const std::vector<std::string> &CausalityLabels();

// Inspects the triggering binding:
//   SHAPE_ZERO_DIM   a rank-0 or zero-extent data tensor
//   SHAPE_BIG_INDEX  an index-role integer >= 2^20
//   VALUE_ZERO       a zero reaching a divisor
//   VALUE_BIG_INT    any integer with |v| > 2^31
//   VALUE_NEGATIVE   a negative extent, or a negative index-role or
//                    size-like value
//   TYPE_MISMATCH    a dtype outside the declaration
//   OTHER
// File-path params are paths, not data, and are not inspected.
std::string ClassifyCausality(const TestInput &in, const OpSpec &spec, const ParamRoles &roles);

}  // namespace opfuzz

#endif  // OPFUZZ_CAUSALITY_H_
