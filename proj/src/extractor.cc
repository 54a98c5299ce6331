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

// Constraint extraction. Sinks are found from taint alone; the tree shape is
// then recovered from dominance: a sink sits under an `if` arm when the arm's
// first block dominates the sink, and inside a loop when it belongs to the
// loop's natural body.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

#include "opfuzz/extractor.h"

namespace opfuzz {

namespace {

struct Loop {
  int header = -1;
  std::set<int> body;  // natural loop, header included
  int var_slot = -1;
  int lo = -1;  // value ids stored into the counter and bound slots
  int hi = -1;
  bool mixed = false;
};

class Extractor {
 public:
  explicit Extractor(const KernelIR &k) : k_(k) {
    for (const auto &b : k_.blocks)
      for (const auto &in : b.instrs)
        if (in.op == Opcode::kLStore) stores_[in.slot].push_back(in.operands[0]);
  }

  ExtractResult Run() {
    ExtractResult r;
    r.taint = PropagateTaint(k_, SeedSources(k_));
    r.sinks = FindSinks(k_, r.taint);
    taint_ = &r.taint;
    for (const auto &s : r.sinks) sink_blocks_.insert(s.block);
    idom_ = Dominators(k_);
    FindLoops();
    r.tree.op = k_.kernel_id;
    std::map<int, int> omitted;  // loop header -> sinks dropped
    for (const auto &s : r.sinks) {
      if (idom_[static_cast<size_t>(s.block)] < 0) continue;
      const Loop *loop = nullptr;
      bool in_mixed = false;
      for (const auto &l : loops_) {
        if (!l.body.count(s.block) || l.header == s.block) continue;
        if (l.mixed) {
          in_mixed = true;
          ++omitted[l.header];
        }
        loop = &l;
      }
      if (in_mixed) continue;
      AddSink(s, loop, r.tree.root);
    }
    for (const auto &[header, n] : omitted)
      r.tree.omissions.push_back(k_.kernel_id + ": loop at block " + std::to_string(header) +
                                 " has a mixed body; " + std::to_string(n) +
                                 " check(s) not extracted");
    return r;
  }

 private:
  void FindLoops() {
    for (const auto &b : k_.blocks) {
      if (idom_[static_cast<size_t>(b.id)] < 0) continue;
      for (int s : b.Successors()) {
        if (!Dominates(idom_, s, b.id)) continue;
        Loop l;
        l.header = s;
        l.body.insert(s);
        std::vector<int> work{b.id};
        while (!work.empty()) {
          int x = work.back();
          work.pop_back();
          if (!l.body.insert(x).second) continue;
          for (const auto &p : k_.blocks)
            for (int succ : p.Successors())
              if (succ == x && idom_[static_cast<size_t>(p.id)] >= 0) work.push_back(p.id);
        }
        DescribeLoop(l);
        loops_.push_back(std::move(l));
      }
    }
  }

  void DescribeLoop(Loop &l) {
    const Block &h = k_.blocks[static_cast<size_t>(l.header)];
    const Instr &br = h.terminator();
    const Instr &cmp = k_.Def(br.operands[0]);
    if (cmp.op != Opcode::kCmp || k_.Def(cmp.operands[0]).op != Opcode::kLLoad ||
        k_.Def(cmp.operands[1]).op != Opcode::kLLoad) {
      l.mixed = true;
      return;
    }
    l.var_slot = k_.Def(cmp.operands[0]).slot;
    int hi_slot = k_.Def(cmp.operands[1]).slot;
    for (const auto &b : k_.blocks) {
      auto succ = b.Successors();
      if (l.body.count(b.id) || std::find(succ.begin(), succ.end(), l.header) == succ.end()) continue;
      for (const auto &in : b.instrs) {
        if (in.op != Opcode::kLStore) continue;
        if (in.slot == l.var_slot) l.lo = in.operands[0];
        if (in.slot == hi_slot) l.hi = in.operands[0];
      }
    }
    for (int id : l.body) {
      if (id == l.header) continue;
      const Block &b = k_.blocks[static_cast<size_t>(id)];
      for (const auto &in : b.instrs) {
        switch (in.op) {
          case Opcode::kTStore:
          case Opcode::kEmit:
          case Opcode::kResCall:
          case Opcode::kRet:
            l.mixed = true;
            break;
          case Opcode::kLStore:
            if (in.slot != l.var_slot) l.mixed = true;
            break;
          case Opcode::kBr:
            if (!sink_blocks_.count(id)) l.mixed = true;
            break;
          default:
            break;
        }
      }
    }
  }

  // ---- lifting -----------------------------------------------------------

  std::optional<ExprPtr> Lift(int v, int var_slot, int depth = 0) {
    if (depth > 64) return std::nullopt;
    const Instr &in = k_.Def(v);
    auto sub = [&](int x) { return Lift(x, var_slot, depth + 1); };
    auto tensor_name = [&](int x) -> std::optional<std::string> {
      const Instr &d = k_.Def(x);
      if (d.op != Opcode::kGetInput) return std::nullopt;
      return d.name;
    };
    switch (in.op) {
      case Opcode::kConst:
        if (const auto *i = std::get_if<int64_t>(&in.imm)) {
          if (k_.values[static_cast<size_t>(v)].type == VType::kBool) return ex::Bool(*i != 0);
          return ex::Int(*i);
        }
        if (const auto *d = std::get_if<double>(&in.imm)) return ex::Float(*d);
        return ex::Str(std::get<std::string>(in.imm));
      case Opcode::kGetAttr:
        return ex::Attr(in.name);
      case Opcode::kRank:
      case Opcode::kSize:
      case Opcode::kDType:
      case Opcode::kDim: {
        auto p = tensor_name(in.operands[0]);
        if (!p) return std::nullopt;
        if (in.op == Opcode::kRank) return ex::Ndim(*p);
        if (in.op == Opcode::kSize) return ex::Size(*p);
        if (in.op == Opcode::kDType) return ex::DTypeOf(*p);
        auto axis = sub(in.operands[1]);
        if (!axis) return std::nullopt;
        return ex::Dim(*p, *axis);
      }
      case Opcode::kTLoad: {
        const Instr &addr = k_.Def(in.operands[0]);
        auto p = tensor_name(addr.operands[0]);
        if (!p || taint_->tensors.count(*p)) return std::nullopt;
        std::vector<ExprPtr> idx;
        for (size_t i = 1; i < addr.operands.size(); ++i) {
          auto e = sub(addr.operands[i]);
          if (!e) return std::nullopt;
          idx.push_back(*e);
        }
        return ex::Val(*p, std::move(idx));
      }
      case Opcode::kLLoad: {
        if (in.slot == var_slot) return ex::Var(k_.slots[static_cast<size_t>(in.slot)]);
        auto it = stores_.find(in.slot);
        if (it == stores_.end() || it->second.size() != 1) return std::nullopt;
        return sub(it->second.front());
      }
      case Opcode::kBin: {
        auto a = sub(in.operands[0]), b = sub(in.operands[1]);
        if (!a || !b) return std::nullopt;
        if ((in.bin == BinOp::kDiv || in.bin == BinOp::kMod) && (*b)->IsLiteral() &&
            (*b)->ival == 0 && (*b)->fval == 0)
          return std::nullopt;
        return ex::Bin(in.bin, *a, *b);
      }
      case Opcode::kCmp: {
        auto a = sub(in.operands[0]), b = sub(in.operands[1]);
        if (!a || !b) return std::nullopt;
        return ex::Cmp(in.cmp, *a, *b);
      }
      case Opcode::kLogic: {
        auto a = sub(in.operands[0]);
        if (!a) return std::nullopt;
        if (in.logic == LogicOp::kNot) return ex::Not(*a);
        auto b = sub(in.operands[1]);
        if (!b) return std::nullopt;
        return in.logic == LogicOp::kAnd ? ex::And(*a, *b) : ex::Or(*a, *b);
      }
      default:
        return std::nullopt;
    }
  }

  // IR-level rendering of a guard that could not be lifted.
  std::string Render(int v, int depth = 0) const {
    if (depth > 16) return "...";
    const Instr &in = k_.Def(v);
    auto r = [&](size_t i) { return Render(in.operands[i], depth + 1); };
    switch (in.op) {
      case Opcode::kConst: return ScalarToString(in.imm);
      case Opcode::kGetInput:
      case Opcode::kGetAttr: return in.name;
      case Opcode::kRank:
      case Opcode::kSize:
      case Opcode::kDType:
      case Opcode::kLen: return std::string(OpcodeName(in.op)) + "(" + r(0) + ")";
      case Opcode::kDim: return "dim(" + r(0) + ", " + r(1) + ")";
      case Opcode::kTLoad: {
        const Instr &addr = k_.Def(in.operands[0]);
        std::string s = Render(addr.operands[0], depth + 1) + "[";
        for (size_t i = 1; i < addr.operands.size(); ++i)
          s += (i > 1 ? ", " : "") + Render(addr.operands[i], depth + 1);
        return s + "]";
      }
      case Opcode::kLLoad: return "$" + k_.slots[static_cast<size_t>(in.slot)];
      case Opcode::kBin: return "(" + r(0) + " " + std::string(BinOpSymbol(in.bin)) + " " + r(1) + ")";
      case Opcode::kCmp: return "(" + r(0) + " " + std::string(CmpOpSymbol(in.cmp)) + " " + r(1) + ")";
      case Opcode::kLogic:
        if (in.logic == LogicOp::kNot) return "!" + r(0);
        return "(" + r(0) + " " + std::string(LogicOpSymbol(in.logic)) + " " + r(1) + ")";
      case Opcode::kResCall: return "call " + in.name + "(" + in.entity + ")";
      default: return "%" + std::to_string(v);
    }
  }

  // ---- tree assembly -----------------------------------------------------

  struct Guard {
    int block;
    int cond;
    bool arm_true;
    int arm;
  };

  std::vector<Guard> GuardsOf(int sink_block) const {
    std::vector<Guard> out;
    for (const auto &b : k_.blocks) {
      const Instr &t = b.terminator();
      if (t.op != Opcode::kBr || sink_blocks_.count(b.id) || b.id == sink_block) continue;
      if (taint_->values[static_cast<size_t>(t.operands[0])].empty()) continue;
      bool header = std::any_of(loops_.begin(), loops_.end(), [&](const Loop &l) { return l.header == b.id; });
      if (header) continue;
      for (bool arm_true : {true, false}) {
        int arm = arm_true ? t.target_true : t.target_false;
        if (Dominates(idom_, arm, sink_block)) out.push_back({b.id, t.operands[0], arm_true, arm});
      }
    }
    // Outer arms dominate inner ones.
    std::sort(out.begin(), out.end(), [&](const Guard &a, const Guard &b) {
      return a.arm != b.arm && Dominates(idom_, a.arm, b.arm);
    });
    return out;
  }

  void AddSink(const SinkSite &s, const Loop *loop, TreeNode &root) {
    TreeNode *node = &root;
    std::string unliftable_guard;
    for (const Guard &g : GuardsOf(s.block)) {
      auto cond = Lift(g.cond, -1);
      if (!cond) {
        unliftable_guard = (g.arm_true ? "" : "!") + Render(g.cond);
        break;
      }
      ExprPtr c = Normalize(g.arm_true ? *cond : ex::Not(*cond));
      node = &node->BranchFor(c, g.block);
    }
    std::optional<Quantifier> q;
    if (loop) {
      auto lo = loop->lo >= 0 ? Lift(loop->lo, -1) : std::nullopt;
      auto hi = loop->hi >= 0 ? Lift(loop->hi, -1) : std::nullopt;
      if (lo && hi) q = Quantifier{k_.slots[static_cast<size_t>(loop->var_slot)], Normalize(*lo), Normalize(*hi)};
    }
    int var_slot = loop ? loop->var_slot : -1;
    auto pred = unliftable_guard.empty() && (!loop || q) ? Lift(s.cond, var_slot) : std::nullopt;
    if (!pred) {
      Constraint c;
      c.unliftable = true;
      c.block = s.block;
      c.opaque = (s.pass_on_true ? "" : "!") + Render(s.cond);
      if (!unliftable_guard.empty()) c.opaque = "under " + unliftable_guard + ": " + c.opaque;
      node->AddConstraint(std::move(c));
      return;
    }
    ExprPtr p = Normalize(s.pass_on_true ? *pred : ex::Not(*pred));
    for (const auto &part : Conjuncts(p)) {
      if (part->kind == ExprKind::kBool && part->ival) continue;  // tautology
      Constraint c;
      c.pred = part;
      c.forall = q;
      c.block = s.block;
      node->AddConstraint(std::move(c));
    }
  }

  const KernelIR &k_;
  const TaintState *taint_ = nullptr;
  std::map<int, std::vector<int>> stores_;
  std::set<int> sink_blocks_;
  std::vector<int> idom_;
  std::vector<Loop> loops_;
};

bool NamesDeclared(const ExprPtr &e, const OpSpec &spec) {
  for (const auto &p : ReferencedParams(e))
    if (!spec.FindParam(p)) return false;
  return true;
}

void LiftNode(TreeNode &node, const OpSpec &spec) {
  for (auto &c : node.constraints) {
    if (c.unliftable) continue;
    bool ok = NamesDeclared(c.pred, spec) &&
              (!c.forall || (NamesDeclared(c.forall->lo, spec) && NamesDeclared(c.forall->hi, spec)));
    if (!ok) {
      c.opaque = c.Print();
      c.unliftable = true;
      c.pred = nullptr;
      c.forall.reset();
    }
  }
  for (auto &b : node.branches) LiftNode(b.body, spec);
}

}  // namespace

ExtractResult ExtractConstraints(const KernelIR &kernel) { return Extractor(kernel).Run(); }

ConstraintTree LiftToSpec(const ConstraintTree &tree, const OpSpec &spec) {
  ConstraintTree out = tree;
  out.op = spec.name;
  LiftNode(out.root, spec);
  return out;
}

}  // namespace opfuzz
