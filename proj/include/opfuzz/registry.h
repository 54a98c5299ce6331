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

#ifndef OPFUZZ_REGISTRY_H_
#define OPFUZZ_REGISTRY_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/dtype.h"

namespace opfuzz {

enum class ParamRole { kInput, kAttr };
enum class Container { kScalar, kTensor, kResource, kFilePath };

std::string_view ContainerName(Container c);

struct ParamDecl {
  std::string name;
  ParamRole role = ParamRole::kInput;
  DType dtype = DType::kDtInt64;
  // Every dtype the parameter accepts; dtypes.front() == dtype.
  std::vector<DType> dtypes;
  Container container = Container::kTensor;
  // Entity kind of resource params ("Stack"), empty otherwise.
  std::string entity;

  bool operator==(const ParamDecl &) const = default;
};

struct OutputDecl {
  std::string name;
  DType dtype = DType::kDtFloat;
  std::string entity;
  bool operator==(const OutputDecl &) const = default;
};

// Frontend-visible operator signature.
struct OpSpec {
  std::string name;
  std::vector<std::string> module_path;
  std::vector<std::vector<std::string>> aliases;
  std::vector<ParamDecl> params;
  std::vector<OutputDecl> outputs;
  // Empty for frontend-only operators.
  std::string kernel_id;
  bool skip = false;
  std::string source_file;
  int source_line = 0;

  const ParamDecl *FindParam(std::string_view pname) const;
  int ParamIndex(std::string_view pname) const;
  // Module path plus every alias path.
  std::vector<std::vector<std::string>> DeclaredPaths() const;
  bool operator==(const OpSpec &o) const;
};

// Parses an operator descriptor file (`op { ... }` blocks).
std::vector<OpSpec> ParseOpSpecs(std::string_view text,
                                 const std::string &file = "<descriptor>");

// Module-Operator tree. Nodes are dotted module paths; every operator is
// placed at exactly one node, the shortest of its declared paths.
struct ModuleTree {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;  // parent -> child
  std::map<std::string, std::vector<std::string>> placement;

  const std::vector<std::string> &PathOf(const std::string &op) const;
};

std::string JoinPath(const std::vector<std::string> &path);

// Breadth-first placement; ties on length go to the lexicographically
// smallest path. Throws on cyclic (self-repeating) module paths.
ModuleTree BuildModuleTree(const std::vector<OpSpec> &specs);

// Operators sharing (name, ordered param signature, kernel binding).
struct OpGroup {
  std::string representative;
  std::vector<std::string> members;  // qualified "module.path.Name"
  std::string kernel_id;
};

std::vector<OpGroup> DedupOperators(const std::vector<OpSpec> &specs);

// kernel_id -> operator names. Throws when a kernel id is not in
// `known_kernels` (pass an empty set to skip the check).
std::map<std::string, std::vector<std::string>> GroupByKernel(
    const std::vector<OpSpec> &specs, const std::set<std::string> &known_kernels);

// The deduplicated, testable operator set: one spec per name, skipping
// `skip: true` and frontend-only descriptors. Warnings are appended for
// frontend-only operators.
struct Registry {
  std::vector<OpSpec> all;       // declaration order, every descriptor
  std::vector<OpSpec> testable;  // sorted by name
  ModuleTree tree;
  std::vector<OpGroup> groups;
  std::map<std::string, std::vector<std::string>> kernel_groups;
  std::vector<std::string> warnings;

  const OpSpec *Find(std::string_view name) const;
};

Registry BuildRegistry(std::vector<OpSpec> specs,
                       const std::set<std::string> &known_kernels);

}  // namespace opfuzz

#endif  // OPFUZZ_REGISTRY_H_
