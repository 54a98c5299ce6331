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

#include "opfuzz/templates.h"

#include <algorithm>

#include "opfuzz/classify.h"
#include "opfuzz/constraint_eval.h"

namespace opfuzz {

ControlTemplate BuildControlTemplate(const OpSpec &spec, const Registry &registry,
                                     const std::vector<EntityGroup> &groups,
                                     const TestScript *script,
                                     const std::vector<ExecMode> &modes) {
  ControlTemplate ct;
  ct.op = spec.name;
  ct.modes = modes;
  ct.kernel_group = spec.kernel_id;
  if (const EntityGroup *g = GroupOf(groups, spec.name)) {
    ct.entity = g->entity;
    for (const auto &seq : g->sequences) {
      auto it = std::find(seq.begin(), seq.end(), spec.name);
      if (it != seq.end()) {
        ct.sequence = seq;
        ct.position = static_cast<int>(it - seq.begin());
        break;
      }
    }
  }
  for (const auto &p : spec.params) {
    if (p.container == Container::kFilePath) {
      if (script && !script->fixtures.empty()) {
        ct.file_fixtures[p.name] = script->fixtures.front().name;
      } else {
        ct.unfillable = true;
        ct.reason = "file param '" + p.name + "' has no fixture";
      }
    } else if (p.container == Container::kResource) {
      // A producer is any operator that outputs a handle of the same entity.
      std::string producer;
      for (const auto &other : registry.testable) {
        for (const auto &o : other.outputs)
          if (o.dtype == DType::kDtResource && o.entity == p.entity) producer = other.name;
        if (!producer.empty()) break;
      }
      if (producer.empty()) {
        ct.unfillable = true;
        ct.reason = "resource param '" + p.name + "' has no producer";
      } else {
        ct.producers[p.name] = producer;
      }
    }
  }
  return ct;
}

namespace {

using OrderMap = std::map<std::string, int>;

std::string Subscript(const std::vector<int64_t> &idx) {
  std::string s;
  for (int64_t i : idx) s += (s.empty() ? "" : ", ") + std::to_string(i);
  return s;
}

std::string SubjectText(const Fact &f) {
  switch (f.subject) {
    case Subject::kNdim: return "ndim";
    case Subject::kSize: return "size";
    case Subject::kDim: return f.all ? "dim[*]" : "dim[" + std::to_string(f.axis) + "]";
    case Subject::kVal: return f.all ? "val[*]" : "val[" + Subscript(f.index) + "]";
    case Subject::kAttr: return "value";
    case Subject::kDType: return "dtype";
  }
  return "?";
}

bool HasVar(const ExprPtr &e) {
  if (e->kind == ExprKind::kVar) return true;
  return std::any_of(e->kids.begin(), e->kids.end(), HasVar);
}

struct Owned {
  std::string param;
  Fact fact;
};

std::optional<Owned> AsSubject(const ExprPtr &e, const std::string &qvar) {
  Fact f;
  auto quantified = [&](const ExprPtr &k) {
    return k->kind == ExprKind::kVar && !qvar.empty() && k->name == qvar;
  };
  switch (e->kind) {
    case ExprKind::kAttr: f.subject = Subject::kAttr; break;
    case ExprKind::kNdim: f.subject = Subject::kNdim; break;
    case ExprKind::kSize: f.subject = Subject::kSize; break;
    case ExprKind::kDType: f.subject = Subject::kDType; break;
    case ExprKind::kDim:
      f.subject = Subject::kDim;
      if (e->kids[0]->kind == ExprKind::kInt) f.axis = e->kids[0]->ival;
      else if (quantified(e->kids[0])) f.all = true;
      else return std::nullopt;
      break;
    case ExprKind::kVal:
      f.subject = Subject::kVal;
      for (const auto &k : e->kids) {
        if (k->kind == ExprKind::kInt) f.index.push_back(k->ival);
        else if (quantified(k)) f.all = true;
        else return std::nullopt;
      }
      if (f.all) f.index.clear();
      break;
    default:
      return std::nullopt;
  }
  return Owned{e->name, f};
}

// True when `rhs` can be evaluated once the parameters before `pos` exist.
// Element facts may also read lower-offset elements of their own tensor.
bool Closed(const ExprPtr &rhs, const Owned &subj, const OrderMap &om) {
  if (HasVar(rhs)) return false;
  int pos = om.at(subj.param);
  bool ok = true;
  auto walk = [&](auto &&self, const ExprPtr &e) -> void {
    if (!e->IsLiteral() && e->IsAtom()) {
      auto it = om.find(e->name);
      if (it == om.end()) {
        ok = false;
      } else if (it->second >= pos) {
        bool self_elem = e->name == subj.param && e->kind == ExprKind::kVal &&
                         subj.fact.subject == Subject::kVal && !subj.fact.all;
        if (!self_elem) ok = false;
      }
    }
    for (const auto &k : e->kids) self(self, k);
  };
  walk(walk, rhs);
  return ok;
}

std::optional<Owned> CmpFact(CmpOp op, const ExprPtr &a, const ExprPtr &b, const std::string &qvar,
                             const OrderMap &om) {
  // (x % m) == 0
  for (int side = 0; side < 2; ++side) {
    const ExprPtr &s = side == 0 ? a : b;
    const ExprPtr &o = side == 0 ? b : a;
    if (op == CmpOp::kEq && o->kind == ExprKind::kInt && o->ival == 0 &&
        s->kind == ExprKind::kBin && s->bin == BinOp::kMod) {
      auto subj = AsSubject(s->kids[0], qvar);
      if (subj && om.count(subj->param) && Closed(s->kids[1], *subj, om)) {
        subj->fact.multiple_of = true;
        subj->fact.op = CmpOp::kEq;
        subj->fact.rhs = s->kids[1];
        return subj;
      }
    }
  }
  auto sa = AsSubject(a, qvar);
  auto sb = AsSubject(b, qvar);
  auto pos = [&](const std::optional<Owned> &s) {
    if (!s) return -1;
    auto it = om.find(s->param);
    return it == om.end() ? -1 : it->second;
  };
  std::vector<std::pair<std::optional<Owned>, bool>> tries;  // (subject, on_left)
  if (pos(sa) >= pos(sb)) tries = {{sa, true}, {sb, false}};
  else tries = {{sb, false}, {sa, true}};
  for (auto &[s, left] : tries) {
    if (pos(s) < 0) continue;
    const ExprPtr &rhs = left ? b : a;
    if (!Closed(rhs, *s, om)) continue;
    s->fact.op = left ? op : SwapCmp(op);
    s->fact.rhs = rhs;
    return s;
  }
  return std::nullopt;
}

// Facts implied by a predicate; nullopt when it is not fully expressible.
std::optional<std::vector<Owned>> PredFacts(const ExprPtr &e, const std::string &qvar,
                                            const OrderMap &om, std::vector<std::pair<std::string, FactChoice>> *choices) {
  std::vector<Owned> out;
  if (e->kind == ExprKind::kCmp) {
    auto f = CmpFact(e->cmp, e->kids[0], e->kids[1], qvar, om);
    if (!f) return std::nullopt;
    out.push_back(*f);
    return out;
  }
  if (e->kind == ExprKind::kAttr && om.count(e->name)) {
    Fact f;
    f.subject = Subject::kAttr;
    f.rhs = ex::Int(1);
    out.push_back({e->name, f});
    return out;
  }
  if (e->kind != ExprKind::kLogic) return std::nullopt;
  if (e->logic == LogicOp::kNot) {
    const ExprPtr &k = e->kids[0];
    if (k->kind == ExprKind::kCmp) {
      auto f = CmpFact(NegateCmp(k->cmp), k->kids[0], k->kids[1], qvar, om);
      if (!f) return std::nullopt;
      out.push_back(*f);
      return out;
    }
    if (k->kind == ExprKind::kAttr && om.count(k->name)) {
      Fact f;
      f.subject = Subject::kAttr;
      f.rhs = ex::Int(0);
      out.push_back({k->name, f});
      return out;
    }
    return std::nullopt;
  }
  if (e->logic == LogicOp::kAnd) {
    for (const auto &k : e->kids) {
      auto sub = PredFacts(k, qvar, om, nullptr);
      if (!sub) return std::nullopt;
      out.insert(out.end(), sub->begin(), sub->end());
    }
    return out;
  }
  // Disjunction: one choice on a single parameter.
  if (!choices) return std::nullopt;
  std::vector<ExprPtr> alts;
  auto flatten = [&](auto &&self, const ExprPtr &x) -> void {
    if (x->kind == ExprKind::kLogic && x->logic == LogicOp::kOr) {
      for (const auto &k : x->kids) self(self, k);
    } else {
      alts.push_back(x);
    }
  };
  flatten(flatten, e);
  FactChoice choice;
  std::string owner;
  for (const auto &alt : alts) {
    auto sub = PredFacts(alt, qvar, om, nullptr);
    if (!sub || sub->empty()) return std::nullopt;
    std::vector<Fact> facts;
    for (const auto &o : *sub) {
      if (!owner.empty() && o.param != owner) return std::nullopt;
      owner = o.param;
      facts.push_back(o.fact);
    }
    choice.push_back(std::move(facts));
  }
  choices->push_back({owner, std::move(choice)});
  return out;
}

bool SameSubject(const Fact &a, const Fact &b) {
  return a.subject == b.subject && a.axis == b.axis && a.index == b.index && a.all == b.all &&
         !a.multiple_of && !b.multiple_of;
}

std::string SymbolOf(const ParamDecl &p) {
  if (p.container == Container::kResource) return "H";
  if (p.container == Container::kFilePath) return "FILE";
  switch (ElemKindOf(p.dtype)) {
    case ElemKind::kInt: return "DI";
    case ElemKind::kFloat: return "DF";
    case ElemKind::kString: return "DS";
    case ElemKind::kBool: return "DB";
    case ElemKind::kHandle: return "H";
  }
  return "?";
}

}  // namespace

std::string Fact::Print() const {
  std::string rhs_text = rhs ? opfuzz::Print(rhs) : "?";
  if (multiple_of) return SubjectText(*this) + " multiple of " + rhs_text;
  return SubjectText(*this) + " " + std::string(CmpOpSymbol(op)) + " " + rhs_text;
}

std::string Slot::Print() const {
  std::string head = decl.name + " = ";
  const Fact *ndim1 = nullptr, *size_eq = nullptr;
  for (const auto &f : facts) {
    if (f.subject == Subject::kNdim && f.op == CmpOp::kEq && f.rhs->kind == ExprKind::kInt &&
        f.rhs->ival == 1)
      ndim1 = &f;
    if (f.subject == Subject::kSize && f.op == CmpOp::kEq && !f.multiple_of) size_eq = &f;
  }
  if (ndim1 && size_eq) head += "[" + symbol + "] * " + opfuzz::Print(size_eq->rhs);
  else if (decl.container == Container::kTensor) head += symbol + "[...]";
  else head += symbol;
  std::vector<std::string> notes;
  if (decl.container == Container::kTensor && dtypes.size() > 1) {
    std::string d;
    for (DType t : dtypes) d += (d.empty() ? "" : "|") + std::string(DTypeName(t));
    notes.push_back("dtype in {" + d + "}");
  }
  for (const auto &f : facts)
    if (&f != ndim1 && &f != size_eq) notes.push_back(f.Print());
  for (const auto &c : choices) {
    std::string alt;
    for (const auto &facts_alt : c) {
      std::string one;
      for (const auto &f : facts_alt) one += (one.empty() ? "" : " & ") + f.Print();
      alt += (alt.empty() ? "" : " | ") + one;
    }
    notes.push_back("one of (" + alt + ")");
  }
  std::string tail;
  for (const auto &n : notes) tail += (tail.empty() ? "" : ", ") + n;
  return tail.empty() ? head : head + " {" + tail + "}";
}

const Slot *DataTemplate::FindSlot(const std::string &param) const {
  for (const auto &s : slots)
    if (s.decl.name == param) return &s;
  return nullptr;
}

int DataTemplate::OrderOf(const std::string &param) const {
  auto it = std::find(order.begin(), order.end(), param);
  return it == order.end() ? -1 : static_cast<int>(it - order.begin());
}

DataTemplate BuildDataTemplate(const OpSpec &spec, const TreeNode &tree, const TreePath &path,
                               const std::vector<std::string> &order) {
  (void)tree;
  DataTemplate t;
  t.op = spec.name;
  t.label = path.Label();
  t.guards = path.guards;
  t.order = order;
  OrderMap om;
  for (size_t i = 0; i < order.size(); ++i) om[order[i]] = static_cast<int>(i);
  for (const auto &name : order) {
    const ParamDecl *d = spec.FindParam(name);
    if (!d) throw Error("generation order names unknown param '" + name + "'");
    Slot s;
    s.decl = *d;
    s.symbol = SymbolOf(*d);
    s.dtypes = d->dtypes;
    t.slots.push_back(std::move(s));
  }
  auto slot_of = [&](const std::string &p) -> Slot & { return t.slots[static_cast<size_t>(om.at(p))]; };

  std::vector<std::pair<ExprPtr, std::string>> preds;  // (pred, quantifier var)
  for (const auto &g : path.guards) {
    Constraint c;
    c.pred = g;
    t.constraints.push_back(c);
    preds.push_back({g, ""});
  }
  for (const Constraint *c : path.constraints) {
    t.constraints.push_back(*c);
    if (c->unliftable || !c->pred) continue;
    preds.push_back({c->pred, c->forall ? c->forall->var : ""});
  }
  for (const auto &[pred, qvar] : preds) {
    std::vector<std::pair<std::string, FactChoice>> choices;
    auto facts = PredFacts(pred, qvar, om, &choices);
    if (!facts) continue;
    for (auto &o : *facts) slot_of(o.param).facts.push_back(o.fact);
    for (auto &[owner, c] : choices) slot_of(owner).choices.push_back(std::move(c));
  }

  // dtype facts against literals narrow the accepted set directly.
  for (auto &s : t.slots) {
    for (const auto &f : s.facts) {
      if (f.subject != Subject::kDType || f.rhs->kind != ExprKind::kStr) continue;
      std::vector<DType> keep;
      for (DType d : s.dtypes) {
        bool eq = DTypeName(d) == f.rhs->name;
        if ((f.op == CmpOp::kEq && eq) || (f.op == CmpOp::kNe && !eq)) keep.push_back(d);
      }
      s.dtypes = keep;
    }
    if (s.dtypes.empty()) {
      t.rejected = true;
      t.reason = "no dtype of '" + s.decl.name + "' satisfies the path";
    }
  }

  // Literal equalities must agree with every other literal fact on the same
  // subject.
  TestInput none;
  for (const auto &s : t.slots) {
    for (const auto &eq : s.facts) {
      if (eq.op != CmpOp::kEq || eq.multiple_of || !eq.rhs->IsLiteral()) continue;
      for (const auto &f : s.facts) {
        if (&f == &eq || !SameSubject(eq, f) || !f.rhs->IsLiteral()) continue;
        if (!EvalBool(ex::Cmp(f.op, eq.rhs, f.rhs), none).value_or(false)) {
          t.rejected = true;
          t.reason = "contradictory facts on '" + s.decl.name + "': " + eq.Print() + " and " +
                     f.Print();
        }
      }
    }
  }
  return t;
}

std::vector<DataTemplate> BuildDataTemplates(const OpSpec &spec, const TreeNode &tree) {
  ParamOrder po = ToposortParams(tree, spec);
  std::vector<DataTemplate> out;
  for (const auto &path : EnumeratePaths(tree))
    out.push_back(BuildDataTemplate(spec, tree, path, po.order));
  return out;
}

std::string SerializeTemplate(const DataTemplate &t) {
  std::string out;
  int depth = 0;
  for (const auto &g : t.guards) {
    out += std::string(static_cast<size_t>(2 * depth), ' ') + "branch: " + Print(g) + "\n";
    ++depth;
  }
  std::string pad(static_cast<size_t>(2 * depth), ' ');
  if (t.rejected) out += pad + "rejected: " + t.reason + "\n";
  for (const auto &s : t.slots) out += pad + "slot: " + s.Print() + "\n";
  for (size_t i = t.guards.size(); i < t.constraints.size(); ++i)
    out += pad + t.constraints[i].Print() + "\n";
  return out;
}

}  // namespace opfuzz
