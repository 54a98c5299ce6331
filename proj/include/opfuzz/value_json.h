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

#ifndef OPFUZZ_VALUE_JSON_H_
#define OPFUZZ_VALUE_JSON_H_

#include "json.hpp"
#include "opfuzz/interpreter.h"
#include "opfuzz/tensor.h"

namespace opfuzz {

// Tagged encodings shared by the manifest and campaign reports:
//   {"i64": 5}  {"f64": 0.5}  {"str": "x"}  {"handle": 3}
//   {"dtype": "DT_INT64", "shape": [2], "data": [1, 2]}
//   {"dtype": "DT_INT64", "shape": [1073741824], "fill": 2147483649}
nlohmann::json ScalarToJson(const Scalar &s);
Scalar ScalarFromJson(const nlohmann::json &j);
nlohmann::json ParamValueToJson(const ParamValue &v);
ParamValue ParamValueFromJson(const nlohmann::json &j);
nlohmann::json TestInputToJson(const TestInput &in);
TestInput TestInputFromJson(const nlohmann::json &j);

}  // namespace opfuzz

#endif  // OPFUZZ_VALUE_JSON_H_
