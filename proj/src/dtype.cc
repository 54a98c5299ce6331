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

#include "opfuzz/dtype.h"

#include <array>
#include <utility>

namespace opfuzz {

namespace {
constexpr std::array<std::pair<DType, std::string_view>, 9> kNames = {{
    {DType::kBool, "bool"},
    {DType::kInt, "int"},
    {DType::kFloat, "float"},
    {DType::kString, "string"},
    {DType::kDtInt64, "DT_INT64"},
    {DType::kDtFloat, "DT_FLOAT"},
    {DType::kDtString, "DT_STRING"},
    {DType::kDtBool, "DT_BOOL"},
    {DType::kDtResource, "DT_RESOURCE"},
}};
}  // namespace

std::string_view DTypeName(DType t) {
  for (const auto &[tag, name] : kNames)
    if (tag == t) return name;
  return "?";
}

std::optional<DType> DTypeFromName(std::string_view name) {
  for (const auto &[tag, n] : kNames)
    if (n == name) return tag;
  // Upper-case spellings of the scalar tags are accepted too.
  if (name == "BOOL") return DType::kBool;
  if (name == "INT") return DType::kInt;
  if (name == "FLOAT") return DType::kFloat;
  if (name == "STRING") return DType::kString;
  return std::nullopt;
}

ElemKind ElemKindOf(DType t) {
  switch (t) {
    case DType::kBool:
    case DType::kDtBool:
      return ElemKind::kBool;
    case DType::kInt:
    case DType::kDtInt64:
      return ElemKind::kInt;
    case DType::kFloat:
    case DType::kDtFloat:
      return ElemKind::kFloat;
    case DType::kString:
    case DType::kDtString:
      return ElemKind::kString;
    case DType::kDtResource:
      return ElemKind::kHandle;
  }
  return ElemKind::kInt;
}

bool IsTensorDType(DType t) {
  return t == DType::kDtInt64 || t == DType::kDtFloat ||
         t == DType::kDtString || t == DType::kDtBool;
}

bool IsScalarDType(DType t) {
  return t == DType::kBool || t == DType::kInt || t == DType::kFloat ||
         t == DType::kString;
}

ParseError::ParseError(std::string file, int line, int column,
                       const std::string &msg)
    : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
            ": " + msg),
      file_(std::move(file)),
      line_(line),
      column_(column) {}

}  // namespace opfuzz
