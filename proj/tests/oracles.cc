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

#include "oracles.h"

#include <algorithm>
#include <deque>
#include <random>

#include "opfuzz/constraint_eval.h"
#include "opfuzz/extractor.h"
#include "opfuzz/interpreter.h"

namespace opfuzz::oracle {

std::map<std::string, std::vector<std::string>> MinimalPlacements(const std::vector<OpSpec> &specs) {
  std::map<std::string, std::vector<std::string>> best;
  for (const auto &s : specs) {
    std::vector<std::vector<std::string>> all = {s.module_path};
    all.insert(all.end(), s.aliases.begin(), s.aliases.end());
    for (const auto &p : all) {
      auto it = best.find(s.name);
      if (it == best.end()) {
        best[s.name] = p;
        continue;
      }
      const auto &cur = it->second;
      if (p.size() < cur.size() || (p.size() == cur.size() && p < cur)) it->second = p;
    }
  }
  return best;
}

std::vector<std::set<std::string>> TaintByReachability(const KernelIR &k) {
  // Node ids: values first, then slots, then one node per tensor param.
  size_t nv = k.values.size(), ns = k.slots.size();
  std::map<std::string, size_t> tensor_node;
  for (const auto &p : k.params) tensor_node.emplace(p.name, nv + ns + tensor_node.size());
  size_t n = nv + ns + tensor_node.size();
  std::vector<std::vector<size_t>> succ(n);
  std::vector<std::pair<size_t, std::string>> sources;
  auto addr_tensor = [&](int addr) { return tensor_node.at(k.Def(k.Def(addr).operands[0]).name); };

  for (const auto &b : k.blocks) {
    for (const auto &in : b.instrs) {
      switch (in.op) {
        case Opcode::kGetInput:
        case Opcode::kGetAttr:
          sources.push_back({static_cast<size_t>(in.result), in.name});
          break;
        case Opcode::kBin:
        case Opcode::kCmp:
        case Opcode::kLogic:
        case Opcode::kIndex:
        case Opcode::kRank:
        case Opcode::kDim:
        case Opcode::kSize:
        case Opcode::kDType:
        case Opcode::kLen:
        case Opcode::kResCall:
        case Opcode::kTLoad:
          if (in.result < 0) break;
          for (int o : in.operands) succ[static_cast<size_t>(o)].push_back(static_cast<size_t>(in.result));
          if (in.op == Opcode::kTLoad)
            succ[addr_tensor(in.operands[0])].push_back(static_cast<size_t>(in.result));
          break;
        case Opcode::kTStore:
          for (int o : in.operands) succ[static_cast<size_t>(o)].push_back(addr_tensor(in.operands[0]));
          break;
        case Opcode::kLStore:
          for (int o : in.operands) succ[static_cast<size_t>(o)].push_back(nv + static_cast<size_t>(in.slot));
          break;
        case Opcode::kLLoad:
          succ[nv + static_cast<size_t>(in.slot)].push_back(static_cast<size_t>(in.result));
          break;
        default:
          break;
      }
    }
  }
  std::vector<std::set<std::string>> out(nv);
  for (const auto &[src, name] : sources) {
    std::vector<bool> seen(n, false);
    std::deque<size_t> q{src};
    seen[src] = true;
    while (!q.empty()) {
      size_t u = q.front();
      q.pop_front();
      if (u < nv) out[u].insert(name);
      for (size_t v : succ[u])
        if (!seen[v]) {
          seen[v] = true;
          q.push_back(v);
        }
    }
  }
  return out;
}

namespace {

std::set<int> ReachableWithout(const KernelIR &k, int removed) {
  std::set<int> seen;
  if (k.entry == removed) return seen;
  std::deque<int> q{k.entry};
  seen.insert(k.entry);
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : k.blocks[static_cast<size_t>(u)].Successors())
      if (v != removed && seen.insert(v).second) q.push_back(v);
  }
  return seen;
}

}  // namespace

std::set<int> Reachable(const KernelIR &kernel) { return ReachableWithout(kernel, -1); }

bool DominatesByRemoval(const KernelIR &kernel, int a, int b) {
  if (!Reachable(kernel).count(b)) return false;
  return a == b || !ReachableWithout(kernel, a).count(b);
}

namespace {

// Small-domain choices for one parameter.
struct Domain {
  const KernelParam *param = nullptr;
  std::vector<DType> dtypes;
  std::vector<Scalar> ints, floats, strings, bools;

  const std::vector<Scalar> &Elems(DType d) const {
    switch (ElemKindOf(d)) {
      case ElemKind::kFloat: return floats;
      case ElemKind::kString: return strings;
      case ElemKind::kBool: return bools;
      default: return ints;
    }
  }
};

const std::vector<std::vector<int64_t>> &SmallShapes() {
  static const std::vector<std::vector<int64_t>> kShapes = [] {
    std::vector<std::vector<int64_t>> s = {{}};
    for (int64_t a = 0; a <= 3; ++a) s.push_back({a});
    for (int64_t a = 0; a <= 3; ++a)
      for (int64_t b = 0; b <= 3; ++b) s.push_back({a, b});
    return s;
  }();
  return kShapes;
}

double Power(double base, int64_t exp) {
  double r = 1;
  for (int64_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// Number of distinct values a parameter can take in the domain.
double DomainSize(const Domain &d) {
  switch (d.param->container) {
    case Container::kScalar: return static_cast<double>(d.Elems(d.dtypes.front()).size());
    case Container::kResource: return 3;  // null, open, closed
    case Container::kFilePath:
    case Container::kTensor: {
      double total = 0;
      for (DType t : d.dtypes)
        for (const auto &shape : SmallShapes())
          total += Power(static_cast<double>(d.Elems(t).size()), *ShapeProduct(shape));
      return total;
    }
  }
  return 1;
}

struct Binder {
  HandleTable handles;
  int64_t open_id = 0, closed_id = 0;
};

ParamValue Handle(int64_t which, Binder &b) { return HandleRef{which == 0 ? 0 : which == 1 ? b.open_id : b.closed_id}; }

// The idx-th value of the domain in a fixed enumeration order.
ParamValue Decode(const Domain &d, uint64_t idx, Binder &b) {
  switch (d.param->container) {
    case Container::kScalar: return d.Elems(d.dtypes.front())[idx];
    case Container::kResource: return Handle(static_cast<int64_t>(idx), b);
    default: break;
  }
  for (DType t : d.dtypes) {
    const auto &elems = d.Elems(t);
    for (const auto &shape : SmallShapes()) {
      int64_t n = *ShapeProduct(shape);
      auto count = static_cast<uint64_t>(Power(static_cast<double>(elems.size()), n));
      if (idx >= count) {
        idx -= count;
        continue;
      }
      std::vector<Scalar> data;
      for (int64_t i = 0; i < n; ++i) {
        data.push_back(elems[idx % elems.size()]);
        idx /= elems.size();
      }
      return TensorVal::Dense(t, shape, std::move(data));
    }
  }
  return HandleRef{0};
}

ParamValue Draw(const Domain &d, std::mt19937_64 &rng, Binder &b) {
  auto below = [&](size_t n) { return static_cast<size_t>(rng() % n); };
  switch (d.param->container) {
    case Container::kScalar: {
      const auto &e = d.Elems(d.dtypes.front());
      return e[below(e.size())];
    }
    case Container::kResource: return Handle(static_cast<int64_t>(below(3)), b);
    default: break;
  }
  DType t = d.dtypes[below(d.dtypes.size())];
  const auto &elems = d.Elems(t);
  size_t rank = below(3);
  std::vector<int64_t> shape;
  for (size_t i = 0; i < rank; ++i) shape.push_back(static_cast<int64_t>(below(4)));
  std::vector<Scalar> data;
  for (int64_t i = 0; i < *ShapeProduct(shape); ++i) data.push_back(elems[below(elems.size())]);
  return TensorVal::Dense(t, shape, std::move(data));
}

}  // namespace

SoundnessResult CheckLiftingSoundness(const KernelIR &kernel, int64_t budget, uint64_t seed) {
  SoundnessResult res;
  res.kernel = kernel.kernel_id;
  ExtractResult ex = ExtractConstraints(kernel);

  // String literals of the kernel join the string domain, so equality checks
  // on attrs such as a split type can be satisfied.
  std::vector<Scalar> strings = {std::string()};
  const std::string fixture = "/fixture/bundle";
  for (const auto &blk : kernel.blocks)
    for (const auto &in : kernel.blocks[static_cast<size_t>(blk.id)].instrs)
      if (in.op == Opcode::kConst)
        if (const auto *s = std::get_if<std::string>(&in.imm))
          if (std::find(strings.begin(), strings.end(), Scalar(*s)) == strings.end()) strings.push_back(*s);

  std::vector<Domain> doms;
  for (const auto &p : kernel.params) {
    Domain d;
    d.param = &p;
    d.dtypes = p.dtypes;
    d.ints = {int64_t{-1}, int64_t{0}, int64_t{1}, int64_t{2}};
    d.floats = {-1.0, 0.0, 1.0, 2.0};
    d.bools = {int64_t{0}, int64_t{1}};
    d.strings = strings;
    // File existence is environmental: the control template provisions it.
    if (p.container == Container::kFilePath) d.strings = {fixture};
    doms.push_back(std::move(d));
  }
  double product = 1;
  for (const auto &d : doms) product *= DomainSize(d);
  res.exhaustive = product <= static_cast<double>(budget);
  int64_t total = res.exhaustive ? static_cast<int64_t>(product) : budget;

  std::mt19937_64 rng(seed);
  for (int64_t i = 0; i < total; ++i) {
    Binder binder;
    std::string entity;
    for (const auto &p : kernel.params)
      if (p.container == Container::kResource) entity = p.entity;
    if (!entity.empty()) {
      binder.open_id = binder.handles.Create(entity);
      binder.closed_id = binder.handles.Create(entity);
      binder.handles.Close(binder.closed_id);
    }
    TestInput in;
    auto rest = static_cast<uint64_t>(i);
    for (const auto &d : doms) {
      if (res.exhaustive) {
        auto size = static_cast<uint64_t>(DomainSize(d));
        in.values[d.param->name] = Decode(d, rest % size, binder);
        rest /= size;
      } else {
        in.values[d.param->name] = Draw(d, rng, binder);
      }
    }
    ExecEnv env;
    env.handles = &binder.handles;
    env.files[fixture] = 1024;
    bool holds = EvaluateTree(ex.tree.root, in);
    ExecOutcome out = Execute(kernel, in, ExecMode::kEager, env);
    ++res.bindings;
    res.accepted += holds ? 1 : 0;
    if (holds != out.IsReject()) continue;
    if (++res.failures <= 5)
      res.counterexamples.push_back("binding #" + std::to_string(i) + ": tree " +
                                    (holds ? "holds" : "fails") + ", kernel " +
                                    std::string(VerdictName(out.verdict)) + " (" + out.message + ")");
  }
  return res;
}

}  // namespace opfuzz::oracle
