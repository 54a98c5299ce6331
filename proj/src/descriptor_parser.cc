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

// Reader for operator descriptor files.
//
//   op {
//     name: "BTCBFS"
//     module: "raw_ops"
//     alias: "compat.v1.raw_ops"
//     kernel: "BTCBFSKernel"
//     skip: false
//     input_arg { name: "node_id_range" type: DT_INT64 }
//     attr      { name: "logits_dimension" type: "int" }
//     output_arg{ name: "gains" type: DT_FLOAT }
//   }

#include <set>

#include "opfuzz/lexer.h"
#include "opfuzz/registry.h"

namespace opfuzz {

namespace {

std::vector<std::string> SplitDotted(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '.') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

// Field value: either a quoted string or a bare identifier.
std::string ReadValue(TokenStream &ts) {
  const Token &t = ts.Peek();
  if (t.kind == Token::Kind::kString || t.kind == Token::Kind::kIdent)
    return ts.Next().text;
  ts.Fail("expected string or identifier value");
}

DType ReadDType(TokenStream &ts) {
  Token t = ts.Peek();
  std::string v = ReadValue(ts);
  auto d = DTypeFromName(v);
  if (!d) ts.FailAt(t, "unknown dtype tag '" + v + "'");
  return *d;
}

struct ArgFields {
  std::string name;
  std::vector<DType> dtypes;
  std::string kind;
  std::string entity;
};

ArgFields ReadArgBlock(TokenStream &ts) {
  ArgFields f;
  ts.ExpectPunct("{");
  while (!ts.ConsumePunct("}")) {
    Token key = ts.Peek();
    std::string k = ts.ExpectIdent();
    ts.ExpectPunct(":");
    if (k == "name") {
      f.name = ReadValue(ts);
    } else if (k == "type") {
      f.dtypes.push_back(ReadDType(ts));
    } else if (k == "kind") {
      f.kind = ReadValue(ts);
    } else if (k == "entity") {
      f.entity = ReadValue(ts);
    } else {
      ts.FailAt(key, "unknown argument field '" + k + "'");
    }
  }
  if (f.name.empty()) ts.Fail("argument block without name");
  if (f.dtypes.empty()) ts.Fail("argument '" + f.name + "' without type");
  return f;
}

OpSpec ReadOp(TokenStream &ts) {
  OpSpec spec;
  Token head = ts.Peek();
  spec.source_file = ts.file();
  spec.source_line = head.line;
  ts.ExpectKeyword("op");
  ts.ExpectPunct("{");
  std::set<std::string> seen;
  auto add_param = [&](const Token &at, ParamDecl p) {
    if (!seen.insert(p.name).second)
      ts.FailAt(at, "duplicate param name '" + p.name + "'");
    spec.params.push_back(std::move(p));
  };
  while (!ts.ConsumePunct("}")) {
    Token key = ts.Peek();
    std::string k = ts.ExpectIdent();
    if (k == "input_arg" || k == "attr" || k == "output_arg") {
      ArgFields f = ReadArgBlock(ts);
      if (k == "output_arg") {
        spec.outputs.push_back({f.name, f.dtypes.front(), f.entity});
        continue;
      }
      ParamDecl p;
      p.name = f.name;
      p.dtype = f.dtypes.front();
      p.dtypes = f.dtypes;
      p.entity = f.entity;
      if (k == "attr") {
        p.role = ParamRole::kAttr;
        p.container = Container::kScalar;
        for (DType d : f.dtypes)
          if (!IsScalarDType(d))
            ts.FailAt(key, "attr '" + f.name + "' must have a scalar type");
      } else {
        p.role = ParamRole::kInput;
        if (p.dtype == DType::kDtResource) {
          p.container = Container::kResource;
          if (p.entity.empty())
            ts.FailAt(key, "resource input '" + f.name + "' needs an entity");
        } else if (f.kind == "FILE" || f.kind == "file") {
          p.container = Container::kFilePath;
          if (p.dtype != DType::kDtString)
            ts.FailAt(key, "file input '" + f.name + "' must be DT_STRING");
        } else {
          p.container = Container::kTensor;
          for (DType d : f.dtypes)
            if (!IsTensorDType(d))
              ts.FailAt(key, "input '" + f.name + "' must have a tensor type");
        }
      }
      add_param(key, std::move(p));
      continue;
    }
    ts.ExpectPunct(":");
    if (k == "name") {
      spec.name = ReadValue(ts);
    } else if (k == "module") {
      spec.module_path = SplitDotted(ReadValue(ts));
    } else if (k == "alias") {
      spec.aliases.push_back(SplitDotted(ReadValue(ts)));
    } else if (k == "kernel") {
      spec.kernel_id = ReadValue(ts);
    } else if (k == "skip") {
      std::string v = ReadValue(ts);
      if (v != "true" && v != "false") ts.FailAt(key, "skip must be true or false");
      spec.skip = v == "true";
    } else {
      ts.FailAt(key, "unknown op field '" + k + "'");
    }
  }
  if (spec.name.empty()) ts.FailAt(head, "op block without name");
  return spec;
}

}  // namespace

std::vector<OpSpec> ParseOpSpecs(std::string_view text, const std::string &file) {
  TokenStream ts(Tokenize(text, file), file);
  std::vector<OpSpec> specs;
  while (!ts.AtEnd()) specs.push_back(ReadOp(ts));
  return specs;
}

}  // namespace opfuzz
