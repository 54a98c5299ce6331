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

// Input repair: small shape and value edits that move a generated input into
// the region described by its path constraints.

#include <algorithm>
#include <cmath>
#include <limits>

#include "opfuzz/constraint_eval.h"
#include "opfuzz/generator.h"

namespace opfuzz {

namespace {

constexpr int kMaxPasses = 8;
constexpr size_t kCompoundLimit = 8;
constexpr int64_t kMaxRank = 8;
constexpr int64_t kScanLimit = 4096;

Scalar PadOf(const TensorVal &t) {
  if (t.lazy()) return t.fill();
  if (!t.data().empty()) return t.data().back();
  return ZeroOf(ElemKindOf(t.dtype()));
}

std::optional<Scalar> Coerce(const Scalar &target, ElemKind kind) {
  const auto *i = std::get_if<int64_t>(&target);
  const auto *d = std::get_if<double>(&target);
  const auto *s = std::get_if<std::string>(&target);
  switch (kind) {
    case ElemKind::kFloat:
      if (i) return static_cast<double>(*i);
      if (d) return *d;
      return std::nullopt;
    case ElemKind::kString:
      if (s) return *s;
      return std::nullopt;
    case ElemKind::kBool:
      if (i && (*i == 0 || *i == 1)) return *i;
      return std::nullopt;
    default:
      if (i) return *i;
      if (d && std::isfinite(*d) && std::fabs(*d) < 9e18) return static_cast<int64_t>(std::llround(*d));
      return std::nullopt;
  }
}

std::optional<int64_t> IntOf(const Scalar &s) {
  if (const auto *i = std::get_if<int64_t>(&s)) return *i;
  return std::nullopt;
}

TensorVal *MutableTensor(TestInput &in, const std::string &name) {
  auto it = in.values.find(name);
  return it == in.values.end() ? nullptr : std::get_if<TensorVal>(&it->second);
}

// Candidate inputs in which `atom` evaluates to `target`.
void SetAtom(const ExprPtr &atom, const Scalar &target, const TestInput &in, const VarEnv &vars,
             std::vector<TestInput> &out) {
  auto it = in.values.find(atom->name);
  if (it == in.values.end()) return;
  if (atom->kind == ExprKind::kAttr) {
    const auto *cur = std::get_if<Scalar>(&it->second);
    if (!cur) return;
    ElemKind kind = std::holds_alternative<double>(*cur)        ? ElemKind::kFloat
                    : std::holds_alternative<std::string>(*cur) ? ElemKind::kString
                                                                : ElemKind::kInt;
    auto v = Coerce(target, kind);
    if (!v) return;
    TestInput next = in;
    next.values[atom->name] = *v;
    out.push_back(std::move(next));
    return;
  }
  const auto *t = std::get_if<TensorVal>(&it->second);
  if (!t) return;
  auto n = IntOf(target);
  auto push_shape = [&](std::vector<int64_t> shape) {
    if (shape == t->shape()) return;
    TestInput next = in;
    next.values[atom->name] = t->Reshaped(std::move(shape), PadOf(*t));
    out.push_back(std::move(next));
  };
  switch (atom->kind) {
    case ExprKind::kNdim: {
      if (!n || *n < 0 || *n > kMaxRank) return;
      auto size = t->size();
      std::vector<int64_t> shape(static_cast<size_t>(*n), 1);
      if (*n == 0) {
        push_shape({});
      } else {
        // Keep the leading extents, fold the element count into axis 0.
        for (int64_t k = 0; k < std::min<int64_t>(*n, t->rank()); ++k) shape[static_cast<size_t>(k)] = t->shape()[static_cast<size_t>(k)];
        push_shape(shape);
        if (size && *size >= 0) {
          std::vector<int64_t> flat(static_cast<size_t>(*n), 1);
          flat[0] = *size;
          push_shape(flat);
        }
      }
      return;
    }
    case ExprKind::kSize: {
      if (!n || *n < 0) return;
      if (t->rank() == 0) {
        if (*n != 1) push_shape({*n});
        return;
      }
      std::vector<int64_t> s = t->shape();
      for (size_t axis : {size_t{0}, s.size() - 1}) {
        int64_t rest = 1;
        bool ok = true;
        for (size_t k = 0; k < s.size(); ++k) {
          if (k == axis) continue;
          auto m = CheckedMul(rest, s[k]);
          if (!m) ok = false;
          else rest = *m;
        }
        if (ok && rest > 0 && *n % rest == 0) {
          std::vector<int64_t> r = s;
          r[axis] = *n / rest;
          push_shape(r);
        }
      }
      std::vector<int64_t> flat(s.size(), 1);
      flat[0] = *n;
      push_shape(flat);
      return;
    }
    case ExprKind::kDim: {
      auto axis = EvalValue(atom->kids[0], in, vars);
      auto ax = axis ? IntOf(*axis) : std::nullopt;
      if (!n || *n < 0 || !ax || *ax < 0 || *ax >= kMaxRank) return;
      std::vector<int64_t> s = t->shape();
      if (*ax >= static_cast<int64_t>(s.size())) s.resize(static_cast<size_t>(*ax + 1), 1);
      s[static_cast<size_t>(*ax)] = *n;
      push_shape(s);
      return;
    }
    case ExprKind::kVal: {
      auto v = Coerce(target, ElemKindOf(t->dtype()));
      if (!v) return;
      if (t->lazy()) {
        // Lazy tensors are only edited as a whole, so they stay uniform.
        if (t->uniform() && t->fill() != *v) {
          TestInput next = in;
          next.values[atom->name] = TensorVal::Filled(t->dtype(), t->shape(), *v);
          out.push_back(std::move(next));
        }
        return;
      }
      std::vector<int64_t> idx;
      for (const auto &k : atom->kids) {
        auto iv = EvalValue(k, in, vars);
        auto i = iv ? IntOf(*iv) : std::nullopt;
        if (!i) return;
        idx.push_back(*i);
      }
      if (t->empty()) return;
      auto flat = t->FlatIndex(idx);
      if (!flat) return;
      TestInput next = in;
      MutableTensor(next, atom->name)->Set(*flat, *v);
      out.push_back(std::move(next));
      return;
    }
    case ExprKind::kDType: {
      const auto *name = std::get_if<std::string>(&target);
      auto d = name ? DTypeFromName(*name) : std::nullopt;
      if (!d || !IsTensorDType(*d) || *d == t->dtype()) return;
      ElemKind kind = ElemKindOf(*d);
      auto convert = [&](const Scalar &s) {
        auto c = Coerce(s, kind);
        return c ? *c : ZeroOf(kind);
      };
      TestInput next = in;
      if (t->lazy()) {
        next.values[atom->name] = TensorVal::Filled(*d, t->shape(), convert(t->fill()));
      } else {
        std::vector<Scalar> data;
        data.reserve(t->data().size());
        for (const auto &e : t->data()) data.push_back(convert(e));
        next.values[atom->name] = TensorVal::Dense(*d, t->shape(), std::move(data));
      }
      out.push_back(std::move(next));
      return;
    }
    default:
      return;
  }
}

// Values T with `T op v`, nearest first.
std::vector<Scalar> Targets(CmpOp op, const Scalar &v) {
  if (const auto *s = std::get_if<std::string>(&v)) {
    if (op == CmpOp::kEq) return {*s};
    if (op == CmpOp::kNe) return {*s + "_"};
    return {};
  }
  if (const auto *d = std::get_if<double>(&v)) {
    switch (op) {
      case CmpOp::kEq: case CmpOp::kGe: case CmpOp::kLe: return {*d};
      case CmpOp::kGt: return {std::floor(*d) + 1.0};
      case CmpOp::kLt: return {std::ceil(*d) - 1.0};
      case CmpOp::kNe: return {*d + 1.0, *d - 1.0};
    }
  }
  int64_t i = std::get<int64_t>(v);
  std::vector<Scalar> out;
  auto add = [&](std::optional<int64_t> x) {
    if (x) out.push_back(*x);
  };
  switch (op) {
    case CmpOp::kEq: case CmpOp::kGe: case CmpOp::kLe: add(i); break;
    case CmpOp::kGt: add(CheckedAdd(i, 1)); break;
    case CmpOp::kLt: add(CheckedSub(i, 1)); break;
    case CmpOp::kNe: add(CheckedAdd(i, 1)); add(CheckedSub(i, 1)); break;
  }
  return out;
}

int MaxOrder(const ExprPtr &e, const DataTemplate &t) {
  int m = -1;
  for (const auto &p : ReferencedParams(e)) m = std::max(m, t.OrderOf(p));
  return m;
}

// Candidates where `e` evaluates to `target`.
void SetExpr(const ExprPtr &e, const Scalar &target, const TestInput &in, const VarEnv &vars,
             const DataTemplate &t, std::vector<TestInput> &out) {
  if (e->IsLiteral() || e->kind == ExprKind::kVar) return;
  if (e->kind != ExprKind::kBin) {
    if (e->IsAtom()) SetAtom(e, target, in, vars, out);
    return;
  }
  auto tv = IntOf(target);
  if (!tv) return;
  const ExprPtr &x = e->kids[0];
  const ExprPtr &y = e->kids[1];
  auto xv = EvalValue(x, in, vars);
  auto yv = EvalValue(y, in, vars);
  auto xi = xv ? IntOf(*xv) : std::nullopt;
  auto yi = yv ? IntOf(*yv) : std::nullopt;
  std::vector<std::pair<ExprPtr, std::optional<int64_t>>> solves;
  if (yi) {
    std::optional<int64_t> nx;
    switch (e->bin) {
      case BinOp::kAdd: nx = CheckedSub(*tv, *yi); break;
      case BinOp::kSub: nx = CheckedAdd(*tv, *yi); break;
      case BinOp::kMul: if (*yi != 0 && *tv % *yi == 0) nx = *tv / *yi; break;
      case BinOp::kDiv: if (*yi != 0) nx = CheckedMul(*tv, *yi); break;
      case BinOp::kMod:
        if (*yi != 0 && *yi != -1 && xi) {
          int64_t m = *yi < 0 ? -*yi : *yi;
          int64_t base = *xi - *xi % m;
          nx = CheckedAdd(base, *tv);
          if (nx && *nx <= 0 && *tv == 0) nx = m;
        }
        break;
    }
    if (nx) solves.push_back({x, nx});
  }
  if (xi) {
    std::optional<int64_t> ny;
    switch (e->bin) {
      case BinOp::kAdd: ny = CheckedSub(*tv, *xi); break;
      case BinOp::kSub: ny = CheckedSub(*xi, *tv); break;
      case BinOp::kMul: if (*xi != 0 && *tv % *xi == 0) ny = *tv / *xi; break;
      default: break;
    }
    if (ny) solves.push_back({y, ny});
  }
  // Later parameters first: edits should not disturb what came before.
  std::stable_sort(solves.begin(), solves.end(), [&](const auto &a, const auto &b) {
    return MaxOrder(a.first, t) > MaxOrder(b.first, t);
  });
  for (const auto &[sub, val] : solves) SetExpr(sub, Scalar{*val}, in, vars, t, out);
  if (e->bin != BinOp::kMul || !solves.empty()) return;
  // No factor divides the target (or the product overflows): make one factor
  // 1 and the other the target.
  for (const auto &[unit, rest] : {std::pair{y, x}, std::pair{x, y}}) {
    std::vector<TestInput> ones;
    SetExpr(unit, Scalar{int64_t{1}}, in, vars, t, ones);
    for (const auto &o : ones) SetExpr(rest, target, o, vars, t, out);
  }
}

void FixCandidates(const ExprPtr &e, bool want, const TestInput &in, const VarEnv &vars,
                   const DataTemplate &t, std::vector<TestInput> &out) {
  if (e->kind == ExprKind::kCmp) {
    CmpOp op = want ? e->cmp : NegateCmp(e->cmp);
    const ExprPtr &a = e->kids[0];
    const ExprPtr &b = e->kids[1];
    std::vector<std::tuple<ExprPtr, ExprPtr, CmpOp>> sides = {{a, b, op}, {b, a, SwapCmp(op)}};
    if (MaxOrder(b, t) > MaxOrder(a, t)) std::swap(sides[0], sides[1]);
    for (const auto &[subject, other, sop] : sides) {
      auto v = EvalValue(other, in, vars);
      if (!v) continue;
      std::vector<Scalar> targets = Targets(sop, *v);
      if (subject->kind == ExprKind::kDType && sop == CmpOp::kNe) {
        // Any other tensor dtype differs.
        targets.clear();
        for (DType d : {DType::kDtInt64, DType::kDtFloat, DType::kDtString, DType::kDtBool})
          if (*v != Scalar{std::string(DTypeName(d))}) targets.push_back(std::string(DTypeName(d)));
      }
      for (const auto &target : targets) SetExpr(subject, target, in, vars, t, out);
    }
    return;
  }
  if (e->kind == ExprKind::kAttr) {
    SetAtom(e, Scalar{int64_t{want ? 1 : 0}}, in, vars, out);
    return;
  }
  if (e->kind != ExprKind::kLogic) return;
  if (e->logic == LogicOp::kNot) {
    FixCandidates(e->kids[0], !want, in, vars, t, out);
    return;
  }
  bool conj = (e->logic == LogicOp::kAnd) == want;
  for (const auto &k : e->kids) {
    // For a conjunction only the failing parts need work.
    if (conj && EvalBool(k, in, vars).value_or(!want) == want) continue;
    FixCandidates(k, want, in, vars, t, out);
  }
}

// First quantifier index at which the predicate fails.
std::optional<int64_t> FirstFailing(const Constraint &c, const TestInput &in) {
  auto lo = EvalValue(c.forall->lo, in);
  auto hi = EvalValue(c.forall->hi, in);
  auto l = lo ? IntOf(*lo) : std::nullopt;
  auto h = hi ? IntOf(*hi) : std::nullopt;
  if (!l || !h) return std::nullopt;
  int64_t end = std::min(*h, *l + kScanLimit);
  for (int64_t i = *l; i < end; ++i)
    if (!EvalBool(c.pred, in, {{c.forall->var, i}}).value_or(false)) return i;
  if (*h > end) return *h - 1;
  return std::nullopt;
}

std::vector<TestInput> Candidates(const Constraint &c, const TestInput &in, const DataTemplate &t) {
  std::vector<TestInput> out;
  if (c.unliftable || !c.pred) return out;
  VarEnv vars;
  if (c.forall) {
    // The bounds themselves may be undefined; nothing to edit then.
    auto i = FirstFailing(c, in);
    if (!i) return out;
    vars[c.forall->var] = *i;
  }
  FixCandidates(c.pred, true, in, vars, t, out);
  return out;
}

// True when no tensor changed its dtype. Dtype moves exist for probes only.
bool SameDTypes(const TestInput &a, const TestInput &b) {
  for (const auto &[name, v] : a.values) {
    const auto *x = std::get_if<TensorVal>(&v);
    const auto *y = std::get_if<TensorVal>(b.Find(name));
    if (x && y && x->dtype() != y->dtype()) return false;
  }
  return true;
}

int ConstraintOrder(const Constraint &c, const DataTemplate &t) {
  if (!c.pred) return -1;
  return MaxOrder(c.pred, t);
}

}  // namespace

RepairResult RepairInput(const TestInput &in, const DataTemplate &t) {
  RepairResult r;
  r.input = in;
  const auto &cs = t.constraints;
  auto holds = [&](size_t i, const TestInput &x) { return Evaluate(cs[i], x); };
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::vector<size_t> violated;
    for (size_t i = 0; i < cs.size(); ++i)
      if (!holds(i, r.input)) violated.push_back(i);
    if (violated.empty()) {
      r.passes = pass;
      r.fixpoint = true;
      return r;
    }
    std::stable_sort(violated.begin(), violated.end(), [&](size_t a, size_t b) {
      return ConstraintOrder(cs[a], t) < ConstraintOrder(cs[b], t);
    });
    r.passes = pass + 1;
    for (size_t target : violated) {
      // A quantified constraint may need one edit per element.
      for (int step = 0; step < 64 && !holds(target, r.input); ++step) {
        std::vector<bool> before(cs.size());
        for (size_t i = 0; i < cs.size(); ++i) before[i] = holds(i, r.input);
        std::optional<int64_t> failing;
        if (cs[target].forall) failing = FirstFailing(cs[target], r.input);
        int level = ConstraintOrder(cs[target], t);
        // Constraints at or below the target's level that a move broke.
        auto broken = [&](const TestInput &cand) {
          std::vector<size_t> out;
          for (size_t i = 0; i < cs.size(); ++i)
            if (before[i] && ConstraintOrder(cs[i], t) <= level && !holds(i, cand)) out.push_back(i);
          return out;
        };
        auto progress = [&](const TestInput &cand) {
          if (!SameDTypes(r.input, cand)) return false;
          return cs[target].forall ? FirstFailing(cs[target], cand) != failing || holds(target, cand)
                                   : holds(target, cand);
        };
        // Constraints later in generation order may break; later passes
        // re-establish them. When every single move breaks exactly one
        // earlier constraint, one follow-up edit may restore it.
        std::vector<TestInput> cands = Candidates(cs[target], r.input, t);
        std::optional<TestInput> chosen;
        for (auto &cand : cands)
          if (progress(cand) && broken(cand).empty()) {
            chosen = std::move(cand);
            break;
          }
        for (size_t c = 0; !chosen && c < cands.size() && c < kCompoundLimit; ++c) {
          if (!progress(cands[c])) continue;
          auto b = broken(cands[c]);
          if (b.size() != 1) continue;
          for (auto &next : Candidates(cs[b[0]], cands[c], t))
            if (progress(next) && holds(b[0], next) && broken(next).empty()) {
              chosen = std::move(next);
              break;
            }
        }
        bool moved = chosen.has_value();
        if (moved) r.input = std::move(*chosen);
        if (!moved) break;
      }
    }
  }
  r.fixpoint = std::all_of(cs.begin(), cs.end(), [&](const Constraint &c) { return Evaluate(c, r.input); });
  return r;
}

std::vector<TestInput> ViolationMoves(const Constraint &c, const TestInput &in) {
  std::vector<TestInput> out;
  if (c.unliftable || !c.pred) return out;
  DataTemplate none;
  VarEnv vars;
  if (c.forall) {
    auto lo = EvalValue(c.forall->lo, in);
    auto hi = EvalValue(c.forall->hi, in);
    auto l = lo ? IntOf(*lo) : std::nullopt;
    auto h = hi ? IntOf(*hi) : std::nullopt;
    if (!l || !h || *l >= *h) return out;
    vars[c.forall->var] = *l;
  }
  FixCandidates(c.pred, false, in, vars, none, out);
  return out;
}

}  // namespace opfuzz
