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

#include "opfuzz/registry.h"

#include <algorithm>
#include <deque>
#include <tuple>

namespace opfuzz {

std::string_view ContainerName(Container c) {
  switch (c) {
    case Container::kScalar:
      return "scalar";
    case Container::kTensor:
      return "tensor";
    case Container::kResource:
      return "resource";
    case Container::kFilePath:
      return "file-path";
  }
  return "?";
}

const ParamDecl *OpSpec::FindParam(std::string_view pname) const {
  for (const auto &p : params)
    if (p.name == pname) return &p;
  return nullptr;
}

int OpSpec::ParamIndex(std::string_view pname) const {
  for (size_t i = 0; i < params.size(); ++i)
    if (params[i].name == pname) return static_cast<int>(i);
  return -1;
}

std::vector<std::vector<std::string>> OpSpec::DeclaredPaths() const {
  std::vector<std::vector<std::string>> out{module_path};
  out.insert(out.end(), aliases.begin(), aliases.end());
  return out;
}

bool OpSpec::operator==(const OpSpec &o) const {
  return name == o.name && module_path == o.module_path && aliases == o.aliases &&
         params == o.params && outputs == o.outputs && kernel_id == o.kernel_id &&
         skip == o.skip;
}

std::string JoinPath(const std::vector<std::string> &path) {
  std::string out;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += path[i];
  }
  return out;
}

const std::vector<std::string> &ModuleTree::PathOf(const std::string &op) const {
  static const std::vector<std::string> kEmpty;
  auto it = placement.find(op);
  return it == placement.end() ? kEmpty : it->second;
}

namespace {

bool ShorterPath(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

void CheckAcyclic(const OpSpec &spec, const std::vector<std::string> &path) {
  std::set<std::string> seen;
  for (const auto &m : path)
    if (!seen.insert(m).second)
      throw Error(spec.source_file + ":" + std::to_string(spec.source_line) +
                  ": cyclic module path '" + JoinPath(path) + "' for op " + spec.name);
}

}  // namespace

ModuleTree BuildModuleTree(const std::vector<OpSpec> &specs) {
  ModuleTree tree;
  tree.nodes.insert("");
  // Module trie: node path -> child names, and node path -> ops declared there.
  std::map<std::vector<std::string>, std::set<std::string>> children;
  std::map<std::vector<std::string>, std::set<std::string>> ops_at;
  for (const auto &spec : specs) {
    for (const auto &path : spec.DeclaredPaths()) {
      CheckAcyclic(spec, path);
      std::vector<std::string> prefix;
      for (const auto &m : path) {
        children[prefix].insert(m);
        prefix.push_back(m);
      }
      ops_at[path].insert(spec.name);
    }
  }
  // Breadth-first walk from the root; children in sorted order.
  std::deque<std::vector<std::string>> queue{{}};
  while (!queue.empty()) {
    std::vector<std::string> mod = queue.front();
    queue.pop_front();
    for (const auto &op : ops_at[mod]) {
      auto it = tree.placement.find(op);
      if (it == tree.placement.end()) {
        tree.placement.emplace(op, mod);
      } else if (ShorterPath(mod, it->second)) {
        // Duplicate operator reached by a shorter path: move it.
        it->second = mod;
      }
    }
    for (const auto &child : children[mod]) {
      std::vector<std::string> next = mod;
      next.push_back(child);
      tree.nodes.insert(JoinPath(next));
      tree.edges.emplace(JoinPath(mod), JoinPath(next));
      queue.push_back(std::move(next));
    }
  }
  return tree;
}

namespace {

using Signature = std::vector<std::tuple<std::string, int, std::vector<DType>, int, std::string>>;

Signature SignatureOf(const OpSpec &s) {
  Signature sig;
  for (const auto &p : s.params)
    sig.emplace_back(p.name, static_cast<int>(p.role), p.dtypes,
                     static_cast<int>(p.container), p.entity);
  return sig;
}

std::string Qualified(const OpSpec &s) {
  return s.module_path.empty() ? s.name : JoinPath(s.module_path) + "." + s.name;
}

}  // namespace

std::vector<OpGroup> DedupOperators(const std::vector<OpSpec> &specs) {
  using Key = std::tuple<std::string, Signature, std::string>;
  std::map<Key, std::vector<const OpSpec *>> buckets;
  std::vector<Key> order;
  for (const auto &s : specs) {
    Key k{s.name, SignatureOf(s), s.kernel_id};
    auto [it, fresh] = buckets.try_emplace(k);
    if (fresh) order.push_back(k);
    it->second.push_back(&s);
  }
  std::vector<OpGroup> groups;
  for (const auto &k : order) {
    const auto &members = buckets[k];
    const OpSpec *rep = members.front();
    for (const OpSpec *m : members)
      if (ShorterPath(m->module_path, rep->module_path)) rep = m;
    OpGroup g;
    g.representative = Qualified(*rep);
    g.kernel_id = rep->kernel_id;
    for (const OpSpec *m : members) g.members.push_back(Qualified(*m));
    std::sort(g.members.begin(), g.members.end());
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(), [](const OpGroup &a, const OpGroup &b) {
    return a.representative < b.representative;
  });
  return groups;
}

std::map<std::string, std::vector<std::string>> GroupByKernel(
    const std::vector<OpSpec> &specs, const std::set<std::string> &known_kernels) {
  std::map<std::string, std::vector<std::string>> out;
  std::set<std::string> placed;
  for (const auto &s : specs) {
    if (s.kernel_id.empty()) continue;
    if (!known_kernels.empty() && !known_kernels.count(s.kernel_id))
      throw Error(s.source_file + ":" + std::to_string(s.source_line) + ": op " + s.name +
                  " binds unknown kernel '" + s.kernel_id + "'");
    if (!placed.insert(s.name).second) continue;
    out[s.kernel_id].push_back(s.name);
  }
  for (auto &[k, names] : out) std::sort(names.begin(), names.end());
  return out;
}

const OpSpec *Registry::Find(std::string_view name) const {
  for (const auto &s : testable)
    if (s.name == name) return &s;
  for (const auto &s : all)
    if (s.name == name) return &s;
  return nullptr;
}

Registry BuildRegistry(std::vector<OpSpec> specs, const std::set<std::string> &known_kernels) {
  Registry reg;
  reg.all = std::move(specs);
  reg.tree = BuildModuleTree(reg.all);
  reg.groups = DedupOperators(reg.all);
  std::map<std::string, const OpSpec *> by_name;
  for (const auto &s : reg.all) {
    auto [it, fresh] = by_name.emplace(s.name, &s);
    if (!fresh && (SignatureOf(*it->second) != SignatureOf(s) ||
                   it->second->kernel_id != s.kernel_id))
      throw Error(s.source_file + ":" + std::to_string(s.source_line) +
                  ": conflicting definitions of op " + s.name);
  }
  std::vector<OpSpec> backend;
  for (const auto &[name, s] : by_name) {
    if (s->kernel_id.empty()) {
      reg.warnings.push_back("op " + name + " has no kernel (frontend-only); excluded");
      continue;
    }
    backend.push_back(*s);
    if (s->skip) continue;
    OpSpec t = *s;
    t.module_path = reg.tree.PathOf(name);
    reg.testable.push_back(std::move(t));
  }
  GroupByKernel(backend, known_kernels);  // dangling-binding check
  reg.kernel_groups = GroupByKernel(reg.testable, known_kernels);
  return reg;
}

}  // namespace opfuzz
