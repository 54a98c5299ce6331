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

#ifndef OPFUZZ_DTYPE_H_
#define OPFUZZ_DTYPE_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace opfuzz {

// Closed set of parameter types. The unprefixed tags are frontend scalars
// (attrs); the DT_ tags are tensor element types.
enum class DType {
  kBool,
  kInt,
  kFloat,
  kString,
  kDtInt64,
  kDtFloat,
  kDtString,
  kDtBool,
  kDtResource,
};

std::string_view DTypeName(DType t);
std::optional<DType> DTypeFromName(std::string_view name);

// Element kind shared by scalar attrs and tensor elements.
enum class ElemKind { kInt, kFloat, kString, kBool, kHandle };

ElemKind ElemKindOf(DType t);
bool IsTensorDType(DType t);
bool IsScalarDType(DType t);

// Base class of every diagnostic the toolchain raises for malformed input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Error carrying a source position.
class ParseError : public Error {
 public:
  ParseError(std::string file, int line, int column, const std::string &msg);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string &file() const { return file_; }

 private:
  std::string file_;
  int line_;
  int column_;
};

}  // namespace opfuzz

#endif  // OPFUZZ_DTYPE_H_
