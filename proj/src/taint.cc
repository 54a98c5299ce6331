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

#include <algorithm>

#include "opfuzz/extractor.h"

namespace opfuzz {

namespace {

bool Merge(TaintSet &into, const TaintSet &from) {
  size_t before = into.size();
  into.insert(from.begin(), from.end());
  return into.size() != before;
}

// Parameter whose tensor an address value points into.
std::string AddressParam(const KernelIR &k, int addr) {
  const Instr &index = k.Def(addr);
  return k.Def(index.operands[0]).name;
}

}  // namespace

TaintState SeedSources(const KernelIR &kernel) {
  TaintState s;
  s.values.resize(kernel.values.size());
  s.slots.resize(kernel.slots.size());
  for (const auto &b : kernel.blocks) {
    for (const auto &in : b.instrs) {
      if (in.op != Opcode::kGetInput && in.op != Opcode::kGetAttr) continue;
      const KernelParam *p = kernel.FindParam(in.name);
      if (!p || (in.op == Opcode::kGetAttr) != (p->role == ParamRole::kAttr))
        throw Error(kernel.kernel_id + ": fetch of undeclared parameter '" + in.name + "'");
      s.values[static_cast<size_t>(in.result)].insert(in.name);
    }
  }
  return s;
}

std::set<std::string> SeededParams(const TaintState &seeds) {
  std::set<std::string> out;
  for (const auto &t : seeds.values) out.insert(t.begin(), t.end());
  return out;
}

bool PropagateOnce(const KernelIR &kernel, TaintState &s) {
  bool changed = false;
  for (const auto &b : kernel.blocks) {
    for (const auto &in : b.instrs) {
      TaintSet acc;
      for (int op : in.operands) acc.insert(s.values[static_cast<size_t>(op)].begin(),
                                            s.values[static_cast<size_t>(op)].end());
      switch (in.op) {
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
          break;
        case Opcode::kTLoad: {
          auto it = s.tensors.find(AddressParam(kernel, in.operands[0]));
          if (it != s.tensors.end()) acc.insert(it->second.begin(), it->second.end());
          break;
        }
        case Opcode::kTStore:
          changed |= Merge(s.tensors[AddressParam(kernel, in.operands[0])], acc);
          continue;
        case Opcode::kLStore:
          changed |= Merge(s.slots[static_cast<size_t>(in.slot)], acc);
          continue;
        case Opcode::kLLoad:
          acc = s.slots[static_cast<size_t>(in.slot)];
          break;
        default:
          continue;
      }
      if (in.result >= 0) changed |= Merge(s.values[static_cast<size_t>(in.result)], acc);
    }
  }
  return changed;
}

TaintState PropagateTaint(const KernelIR &kernel, TaintState seeds) {
  seeds.passes = 0;
  do {
    ++seeds.passes;
  } while (PropagateOnce(kernel, seeds));
  return seeds;
}

namespace {

// True when `block` reaches a failure intrinsic through jump-only blocks.
bool ReachesFailure(const KernelIR &k, int block) {
  std::set<int> seen;
  while (block >= 0 && seen.insert(block).second) {
    const Block &b = k.blocks[static_cast<size_t>(block)];
    for (const auto &in : b.instrs)
      if (in.op == Opcode::kRequireFail) return true;
    if (b.instrs.size() != 1 || b.terminator().op != Opcode::kJmp) return false;
    block = b.terminator().target_true;
  }
  return false;
}

}  // namespace

std::vector<SinkSite> FindSinks(const KernelIR &kernel, const TaintState &taint) {
  std::vector<SinkSite> out;
  for (const auto &b : kernel.blocks) {
    const Instr &t = b.terminator();
    if (t.op != Opcode::kBr) continue;
    if (taint.values[static_cast<size_t>(t.operands[0])].empty()) continue;
    bool fail_t = ReachesFailure(kernel, t.target_true);
    bool fail_f = ReachesFailure(kernel, t.target_false);
    if (fail_t == fail_f) continue;
    SinkSite s;
    s.block = b.id;
    s.instr = static_cast<int>(b.instrs.size()) - 1;
    s.cond = t.operands[0];
    s.pass_on_true = fail_f;
    s.fail_block = fail_f ? t.target_false : t.target_true;
    out.push_back(s);
  }
  return out;
}

std::vector<int> Dominators(const KernelIR &kernel) {
  size_t n = kernel.blocks.size();
  std::vector<std::vector<int>> preds(n);
  for (const auto &b : kernel.blocks)
    for (int s : b.Successors()) preds[static_cast<size_t>(s)].push_back(b.id);
  // Reverse postorder from the entry.
  std::vector<int> order, state(n, 0);
  std::vector<std::pair<int, size_t>> stack{{kernel.entry, 0}};
  state[static_cast<size_t>(kernel.entry)] = 1;
  while (!stack.empty()) {
    auto &[b, i] = stack.back();
    auto succ = kernel.blocks[static_cast<size_t>(b)].Successors();
    if (i < succ.size()) {
      int s = succ[i++];
      if (!state[static_cast<size_t>(s)]) {
        state[static_cast<size_t>(s)] = 1;
        stack.push_back({s, 0});
      }
    } else {
      order.push_back(b);
      stack.pop_back();
    }
  }
  std::reverse(order.begin(), order.end());
  std::vector<int> rpo(n, -1);
  for (size_t i = 0; i < order.size(); ++i) rpo[static_cast<size_t>(order[i])] = static_cast<int>(i);

  std::vector<int> idom(n, -1);
  idom[static_cast<size_t>(kernel.entry)] = kernel.entry;
  auto intersect = [&](int a, int b) {
    while (a != b) {
      while (rpo[static_cast<size_t>(a)] > rpo[static_cast<size_t>(b)]) a = idom[static_cast<size_t>(a)];
      while (rpo[static_cast<size_t>(b)] > rpo[static_cast<size_t>(a)]) b = idom[static_cast<size_t>(b)];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int b : order) {
      if (b == kernel.entry) continue;
      int nd = -1;
      for (int p : preds[static_cast<size_t>(b)]) {
        if (idom[static_cast<size_t>(p)] < 0) continue;
        nd = nd < 0 ? p : intersect(p, nd);
      }
      if (nd != idom[static_cast<size_t>(b)]) {
        idom[static_cast<size_t>(b)] = nd;
        changed = true;
      }
    }
  }
  return idom;
}

bool Dominates(const std::vector<int> &idom, int a, int b) {
  if (b < 0 || idom[static_cast<size_t>(b)] < 0) return false;
  while (true) {
    if (a == b) return true;
    int up = idom[static_cast<size_t>(b)];
    if (up == b) return false;
    b = up;
  }
}

ParamRoles ComputeParamRoles(const KernelIR &kernel, const TaintState &taint) {
  ParamRoles roles;
  auto taint_of = [&](int v) -> const TaintSet & { return taint.values[static_cast<size_t>(v)]; };
  // Values derived from shape queries, flow-insensitively through slots.
  std::vector<bool> shape(kernel.values.size(), false);
  std::vector<bool> slot_shape(kernel.slots.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto &b : kernel.blocks) {
      for (const auto &in : b.instrs) {
        bool v = false;
        switch (in.op) {
          case Opcode::kRank:
          case Opcode::kDim:
          case Opcode::kSize:
            v = true;
            break;
          case Opcode::kBin:
            v = shape[static_cast<size_t>(in.operands[0])] || shape[static_cast<size_t>(in.operands[1])];
            break;
          case Opcode::kLLoad:
            v = slot_shape[static_cast<size_t>(in.slot)];
            break;
          case Opcode::kLStore:
            if (shape[static_cast<size_t>(in.operands[0])] && !slot_shape[static_cast<size_t>(in.slot)]) {
              slot_shape[static_cast<size_t>(in.slot)] = true;
              changed = true;
            }
            continue;
          default:
            continue;
        }
        if (v && in.result >= 0 && !shape[static_cast<size_t>(in.result)]) {
          shape[static_cast<size_t>(in.result)] = true;
          changed = true;
        }
      }
    }
  }
  auto scalar_taint = [&](int v, std::set<std::string> &into) {
    for (const auto &p : taint_of(v)) into.insert(p);
  };
  for (const auto &b : kernel.blocks) {
    for (const auto &in : b.instrs) {
      if (in.op == Opcode::kIndex) {
        for (size_t i = 1; i < in.operands.size(); ++i) scalar_taint(in.operands[i], roles.index);
      } else if (in.op == Opcode::kDim) {
        scalar_taint(in.operands[1], roles.index);
      } else if (in.op == Opcode::kBin || in.op == Opcode::kCmp) {
        if (in.op == Opcode::kBin && (in.bin == BinOp::kDiv || in.bin == BinOp::kMod))
          scalar_taint(in.operands[1], roles.divisor);
        bool s0 = shape[static_cast<size_t>(in.operands[0])];
        bool s1 = shape[static_cast<size_t>(in.operands[1])];
        if (s0 && !s1) scalar_taint(in.operands[1], roles.size_like);
        if (s1 && !s0) scalar_taint(in.operands[0], roles.size_like);
      }
    }
  }
  roles.size_like.insert(roles.index.begin(), roles.index.end());
  return roles;
}

}  // namespace opfuzz
