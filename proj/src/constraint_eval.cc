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

#include "opfuzz/constraint_eval.h"

#include <cmath>
#include <limits>

namespace opfuzz {

namespace {

const ParamValue &Lookup(const TestInput &in, const std::string &name) {
  const ParamValue *v = in.Find(name);
  if (!v) throw Error("constraint references unbound parameter '" + name + "'");
  return *v;
}

const TensorVal *TensorOf(const TestInput &in, const std::string &name) {
  return std::get_if<TensorVal>(&Lookup(in, name));
}

std::optional<int64_t> AsInt(const std::optional<Scalar> &s) {
  if (!s) return std::nullopt;
  if (const auto *i = std::get_if<int64_t>(&*s)) return *i;
  return std::nullopt;
}

std::optional<double> AsDouble(const Scalar &s) {
  if (const auto *i = std::get_if<int64_t>(&s)) return static_cast<double>(*i);
  if (const auto *d = std::get_if<double>(&s)) return *d;
  return std::nullopt;
}

std::optional<Scalar> Arith(BinOp op, const Scalar &a, const Scalar &b) {
  const auto *x = std::get_if<int64_t>(&a);
  const auto *y = std::get_if<int64_t>(&b);
  if (x && y) {
    switch (op) {
      case BinOp::kAdd: if (auto r = CheckedAdd(*x, *y)) return Scalar{*r}; return std::nullopt;
      case BinOp::kSub: if (auto r = CheckedSub(*x, *y)) return Scalar{*r}; return std::nullopt;
      case BinOp::kMul: if (auto r = CheckedMul(*x, *y)) return Scalar{*r}; return std::nullopt;
      case BinOp::kDiv:
      case BinOp::kMod:
        if (*y == 0 || (*y == -1 && *x == std::numeric_limits<int64_t>::min())) return std::nullopt;
        return Scalar{op == BinOp::kDiv ? *x / *y : *x % *y};
    }
  }
  auto fx = AsDouble(a), fy = AsDouble(b);
  if (!fx || !fy) return std::nullopt;
  switch (op) {
    case BinOp::kAdd: return Scalar{*fx + *fy};
    case BinOp::kSub: return Scalar{*fx - *fy};
    case BinOp::kMul: return Scalar{*fx * *fy};
    case BinOp::kDiv: if (*fy == 0) return std::nullopt; return Scalar{*fx / *fy};
    case BinOp::kMod: if (*fy == 0) return std::nullopt; return Scalar{std::fmod(*fx, *fy)};
  }
  return std::nullopt;
}

std::optional<bool> Compare(CmpOp op, const Scalar &a, const Scalar &b) {
  int c;
  const auto *sa = std::get_if<std::string>(&a);
  const auto *sb = std::get_if<std::string>(&b);
  if (sa || sb) {
    if (!sa || !sb) return std::nullopt;
    int r = sa->compare(*sb);
    c = r < 0 ? -1 : r > 0;
  } else if (std::holds_alternative<int64_t>(a) && std::holds_alternative<int64_t>(b)) {
    int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
    c = x < y ? -1 : x > y;
  } else {
    double x = *AsDouble(a), y = *AsDouble(b);
    c = x < y ? -1 : x > y;
  }
  switch (op) {
    case CmpOp::kEq: return c == 0;
    case CmpOp::kNe: return c != 0;
    case CmpOp::kLt: return c < 0;
    case CmpOp::kLe: return c <= 0;
    case CmpOp::kGt: return c > 0;
    case CmpOp::kGe: return c >= 0;
  }
  return std::nullopt;
}

// True when every val() atom in `e` reads a tensor whose elements are all
// equal, so the predicate is insensitive to interior indices.
bool UniformReads(const ExprPtr &e, const TestInput &in) {
  if (e->kind == ExprKind::kVal) {
    const TensorVal *t = TensorOf(in, e->name);
    if (!t || !t->uniform()) return false;
  }
  for (const auto &k : e->kids)
    if (!UniformReads(k, in)) return false;
  return true;
}

constexpr int64_t kUniformShortcut = int64_t{1} << 16;

}  // namespace

std::optional<Scalar> EvalValue(const ExprPtr &e, const TestInput &in, const VarEnv &vars) {
  switch (e->kind) {
    case ExprKind::kInt:
    case ExprKind::kBool: return Scalar{e->ival};
    case ExprKind::kFloat: return Scalar{e->fval};
    case ExprKind::kStr: return Scalar{e->name};
    case ExprKind::kVar: {
      auto it = vars.find(e->name);
      if (it == vars.end()) throw Error("unbound index variable '" + e->name + "'");
      return Scalar{it->second};
    }
    case ExprKind::kAttr: {
      const ParamValue &v = Lookup(in, e->name);
      if (const auto *s = std::get_if<Scalar>(&v)) return *s;
      return std::nullopt;
    }
    case ExprKind::kNdim:
    case ExprKind::kSize:
    case ExprKind::kDType:
    case ExprKind::kDim:
    case ExprKind::kVal: {
      const TensorVal *t = TensorOf(in, e->name);
      if (!t) return std::nullopt;
      if (e->kind == ExprKind::kNdim) return Scalar{t->rank()};
      if (e->kind == ExprKind::kDType) return Scalar{std::string(DTypeName(t->dtype()))};
      if (e->kind == ExprKind::kSize) {
        auto n = t->size();
        if (!n) return std::nullopt;
        return Scalar{*n};
      }
      if (e->kind == ExprKind::kDim) {
        auto axis = AsInt(EvalValue(e->kids[0], in, vars));
        if (!axis || *axis < 0 || *axis >= t->rank()) return std::nullopt;
        return Scalar{t->shape()[static_cast<size_t>(*axis)]};
      }
      std::vector<int64_t> idx;
      for (const auto &k : e->kids) {
        auto i = AsInt(EvalValue(k, in, vars));
        if (!i) return std::nullopt;
        idx.push_back(*i);
      }
      if (t->empty()) return std::nullopt;
      auto flat = t->FlatIndex(idx);
      if (!flat) return std::nullopt;
      return t->At(*flat);
    }
    case ExprKind::kBin: {
      auto a = EvalValue(e->kids[0], in, vars);
      auto b = EvalValue(e->kids[1], in, vars);
      if (!a || !b) return std::nullopt;
      return Arith(e->bin, *a, *b);
    }
    case ExprKind::kCmp:
    case ExprKind::kLogic: {
      auto b = EvalBool(e, in, vars);
      if (!b) return std::nullopt;
      return Scalar{int64_t{*b}};
    }
  }
  return std::nullopt;
}

std::optional<bool> EvalBool(const ExprPtr &e, const TestInput &in, const VarEnv &vars) {
  if (e->kind == ExprKind::kCmp) {
    auto a = EvalValue(e->kids[0], in, vars);
    auto b = EvalValue(e->kids[1], in, vars);
    if (!a || !b) return std::nullopt;
    return Compare(e->cmp, *a, *b);
  }
  if (e->kind == ExprKind::kLogic) {
    // Both operands are evaluated, mirroring the kernel's eager logic.
    auto a = EvalBool(e->kids[0], in, vars);
    if (e->logic == LogicOp::kNot) {
      if (!a) return std::nullopt;
      return !*a;
    }
    auto b = EvalBool(e->kids[1], in, vars);
    if (!a || !b) return std::nullopt;
    return e->logic == LogicOp::kAnd ? (*a && *b) : (*a || *b);
  }
  auto v = EvalValue(e, in, vars);
  if (!v) return std::nullopt;
  if (const auto *i = std::get_if<int64_t>(&*v)) return *i != 0;
  return std::nullopt;
}

bool Evaluate(const ExprPtr &e, const TestInput &in) { return EvalBool(e, in).value_or(false); }

bool Evaluate(const Constraint &c, const TestInput &in) {
  if (c.unliftable) return true;
  if (!c.forall) return Evaluate(c.pred, in);
  auto lo = AsInt(EvalValue(c.forall->lo, in));
  auto hi = AsInt(EvalValue(c.forall->hi, in));
  if (!lo || !hi) return false;
  VarEnv vars;
  auto holds_at = [&](int64_t i) {
    vars[c.forall->var] = i;
    return EvalBool(c.pred, in, vars).value_or(false);
  };
  if (*hi - *lo > kUniformShortcut && UniformReads(c.pred, in)) {
    for (int64_t i : {*lo, *lo + 1, *hi - 2, *hi - 1})
      if (!holds_at(i)) return false;
    return true;
  }
  for (int64_t i = *lo; i < *hi; ++i)
    if (!holds_at(i)) return false;
  return true;
}

bool EvaluateTree(const TreeNode &root, const TestInput &in) {
  for (const auto &c : root.constraints)
    if (!Evaluate(c, in)) return false;
  for (const auto &b : root.branches)
    if (Evaluate(b.cond, in) && !EvaluateTree(b.body, in)) return false;
  return true;
}

bool EvaluatePath(const TreePath &path, const TestInput &in) {
  for (const auto &g : path.guards)
    if (!Evaluate(g, in)) return false;
  for (const auto *c : path.constraints)
    if (!Evaluate(*c, in)) return false;
  return true;
}

std::vector<const Constraint *> Violations(const TreePath &path, const TestInput &in) {
  std::vector<const Constraint *> out;
  for (const auto *c : path.constraints)
    if (!Evaluate(*c, in)) out.push_back(c);
  return out;
}

}  // namespace opfuzz
