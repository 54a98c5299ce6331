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

#include "opfuzz/constraint_expr.h"

#include <utility>

#include "opfuzz/lexer.h"
#include "opfuzz/tensor.h"

namespace opfuzz {

namespace {

ExprPtr Make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr ParamAtom(ExprKind kind, std::string param, std::vector<ExprPtr> kids = {}) {
  Expr e;
  e.kind = kind;
  e.name = std::move(param);
  e.kids = std::move(kids);
  return Make(std::move(e));
}

bool IsZeroLiteral(const ExprPtr &e) {
  return (e->kind == ExprKind::kInt && e->ival == 0) ||
         (e->kind == ExprKind::kFloat && e->fval == 0);
}

}  // namespace

namespace ex {

ExprPtr Int(int64_t v) {
  Expr e;
  e.kind = ExprKind::kInt;
  e.ival = v;
  return Make(std::move(e));
}

ExprPtr Float(double v) {
  Expr e;
  e.kind = ExprKind::kFloat;
  e.fval = v;
  return Make(std::move(e));
}

ExprPtr Str(std::string v) {
  Expr e;
  e.kind = ExprKind::kStr;
  e.name = std::move(v);
  return Make(std::move(e));
}

ExprPtr Bool(bool v) {
  Expr e;
  e.kind = ExprKind::kBool;
  e.ival = v;
  return Make(std::move(e));
}

ExprPtr Attr(std::string param) { return ParamAtom(ExprKind::kAttr, std::move(param)); }
ExprPtr Var(std::string var) { return ParamAtom(ExprKind::kVar, std::move(var)); }
ExprPtr Ndim(std::string param) { return ParamAtom(ExprKind::kNdim, std::move(param)); }
ExprPtr Dim(std::string param, ExprPtr axis) {
  return ParamAtom(ExprKind::kDim, std::move(param), {std::move(axis)});
}
ExprPtr Size(std::string param) { return ParamAtom(ExprKind::kSize, std::move(param)); }
ExprPtr Val(std::string param, std::vector<ExprPtr> idx) {
  return ParamAtom(ExprKind::kVal, std::move(param), std::move(idx));
}
ExprPtr DTypeOf(std::string param) { return ParamAtom(ExprKind::kDType, std::move(param)); }

ExprPtr Bin(BinOp op, ExprPtr a, ExprPtr b) {
  if ((op == BinOp::kDiv || op == BinOp::kMod) && IsZeroLiteral(b))
    throw Error("constraint expression divides by literal zero");
  Expr e;
  e.kind = ExprKind::kBin;
  e.bin = op;
  e.kids = {std::move(a), std::move(b)};
  return Make(std::move(e));
}

ExprPtr Cmp(CmpOp op, ExprPtr a, ExprPtr b) {
  Expr e;
  e.kind = ExprKind::kCmp;
  e.cmp = op;
  e.kids = {std::move(a), std::move(b)};
  return Make(std::move(e));
}

namespace {
ExprPtr LogicNode(LogicOp op, std::vector<ExprPtr> kids) {
  Expr e;
  e.kind = ExprKind::kLogic;
  e.logic = op;
  e.kids = std::move(kids);
  return Make(std::move(e));
}
}  // namespace

ExprPtr And(ExprPtr a, ExprPtr b) { return LogicNode(LogicOp::kAnd, {std::move(a), std::move(b)}); }
ExprPtr Or(ExprPtr a, ExprPtr b) { return LogicNode(LogicOp::kOr, {std::move(a), std::move(b)}); }
ExprPtr Not(ExprPtr a) { return LogicNode(LogicOp::kNot, {std::move(a)}); }

}  // namespace ex

CmpOp NegateCmp(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return CmpOp::kNe;
    case CmpOp::kNe: return CmpOp::kEq;
    case CmpOp::kLt: return CmpOp::kGe;
    case CmpOp::kLe: return CmpOp::kGt;
    case CmpOp::kGt: return CmpOp::kLe;
    case CmpOp::kGe: return CmpOp::kLt;
  }
  return op;
}

CmpOp SwapCmp(CmpOp op) {
  switch (op) {
    case CmpOp::kLt: return CmpOp::kGt;
    case CmpOp::kLe: return CmpOp::kGe;
    case CmpOp::kGt: return CmpOp::kLt;
    case CmpOp::kGe: return CmpOp::kLe;
    default: return op;
  }
}

namespace {

std::string Quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string PrintOperand(const ExprPtr &e) {
  std::string s = Print(e);
  if (e->kind == ExprKind::kCmp || (e->kind == ExprKind::kLogic && e->logic != LogicOp::kNot))
    return "(" + s + ")";
  return s;
}

}  // namespace

std::string Print(const ExprPtr &e) {
  switch (e->kind) {
    case ExprKind::kInt: return std::to_string(e->ival);
    case ExprKind::kFloat: return ScalarToString(Scalar{e->fval});
    case ExprKind::kStr: return Quote(e->name);
    case ExprKind::kBool: return e->ival ? "true" : "false";
    case ExprKind::kAttr:
    case ExprKind::kVar: return e->name;
    case ExprKind::kNdim: return "ndim(" + e->name + ")";
    case ExprKind::kDim: return "dim(" + e->name + ", " + Print(e->kids[0]) + ")";
    case ExprKind::kSize: return "size(" + e->name + ")";
    case ExprKind::kDType: return "dtype(" + e->name + ")";
    case ExprKind::kVal: {
      std::string s = "val(" + e->name;
      for (const auto &k : e->kids) s += ", " + Print(k);
      return s + ")";
    }
    case ExprKind::kBin:
      return "(" + Print(e->kids[0]) + " " + std::string(BinOpSymbol(e->bin)) + " " +
             Print(e->kids[1]) + ")";
    case ExprKind::kCmp:
      return PrintOperand(e->kids[0]) + " " + std::string(CmpOpSymbol(e->cmp)) + " " +
             PrintOperand(e->kids[1]);
    case ExprKind::kLogic:
      if (e->logic == LogicOp::kNot) return "!(" + Print(e->kids[0]) + ")";
      return PrintOperand(e->kids[0]) + (e->logic == LogicOp::kAnd ? " && " : " || ") +
             PrintOperand(e->kids[1]);
  }
  return "?";
}

namespace {

std::optional<ExprPtr> FoldBin(BinOp op, const ExprPtr &a, const ExprPtr &b) {
  if (a->kind == ExprKind::kInt && b->kind == ExprKind::kInt) {
    int64_t x = a->ival, y = b->ival;
    std::optional<int64_t> r;
    switch (op) {
      case BinOp::kAdd: r = CheckedAdd(x, y); break;
      case BinOp::kSub: r = CheckedSub(x, y); break;
      case BinOp::kMul: r = CheckedMul(x, y); break;
      case BinOp::kDiv:
      case BinOp::kMod:
        if (y == 0 || (y == -1 && x == INT64_MIN)) return std::nullopt;
        r = op == BinOp::kDiv ? x / y : x % y;
        break;
    }
    if (r) return ex::Int(*r);
  }
  return std::nullopt;
}

std::optional<bool> FoldCmp(CmpOp op, const ExprPtr &a, const ExprPtr &b) {
  int c;
  if (a->kind == ExprKind::kInt && b->kind == ExprKind::kInt) {
    c = a->ival < b->ival ? -1 : a->ival > b->ival;
  } else if (a->kind == ExprKind::kStr && b->kind == ExprKind::kStr) {
    c = a->name.compare(b->name);
    c = c < 0 ? -1 : c > 0;
  } else {
    return std::nullopt;
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

}  // namespace

ExprPtr Normalize(const ExprPtr &e) {
  if (e->kids.empty()) return e;
  std::vector<ExprPtr> kids;
  for (const auto &k : e->kids) kids.push_back(Normalize(k));
  switch (e->kind) {
    case ExprKind::kBin:
      if (auto f = FoldBin(e->bin, kids[0], kids[1])) return *f;
      return ex::Bin(e->bin, kids[0], kids[1]);
    case ExprKind::kCmp: {
      if (auto f = FoldCmp(e->cmp, kids[0], kids[1])) return ex::Bool(*f);
      CmpOp op = e->cmp;
      if (op == CmpOp::kLt || op == CmpOp::kLe) {
        std::swap(kids[0], kids[1]);
        op = op == CmpOp::kLt ? CmpOp::kGt : CmpOp::kGe;
      } else if ((op == CmpOp::kEq || op == CmpOp::kNe) && Print(kids[1]) < Print(kids[0])) {
        std::swap(kids[0], kids[1]);
      }
      return ex::Cmp(op, kids[0], kids[1]);
    }
    case ExprKind::kLogic: {
      if (e->logic == LogicOp::kNot) {
        const ExprPtr &k = kids[0];
        if (k->kind == ExprKind::kBool) return ex::Bool(!k->ival);
        if (k->kind == ExprKind::kLogic && k->logic == LogicOp::kNot) return k->kids[0];
        return ex::Not(k);
      }
      bool is_and = e->logic == LogicOp::kAnd;
      for (int i = 0; i < 2; ++i) {
        if (kids[i]->kind != ExprKind::kBool) continue;
        bool v = kids[i]->ival != 0;
        if (v == is_and) return kids[1 - i];  // identity element
        return ex::Bool(v);                   // absorbing element
      }
      return is_and ? ex::And(kids[0], kids[1]) : ex::Or(kids[0], kids[1]);
    }
    default: {
      Expr copy = *e;
      copy.kids = std::move(kids);
      return std::make_shared<const Expr>(std::move(copy));
    }
  }
}

std::vector<ExprPtr> Conjuncts(const ExprPtr &e) {
  if (e->kind == ExprKind::kLogic && e->logic == LogicOp::kAnd) {
    auto out = Conjuncts(e->kids[0]);
    for (auto &c : Conjuncts(e->kids[1])) out.push_back(std::move(c));
    return out;
  }
  return {e};
}

namespace {

class ExprParser {
 public:
  ExprParser(TokenStream ts, const std::set<std::string> &vars) : ts_(std::move(ts)), vars_(vars) {}

  ExprPtr ParseAll() {
    ExprPtr e = Or();
    if (!ts_.AtEnd()) ts_.Fail("unexpected trailing tokens in constraint");
    return e;
  }

 private:
  ExprPtr Or() {
    ExprPtr e = And();
    while (ts_.ConsumePunct("||")) e = ex::Or(e, And());
    return e;
  }
  ExprPtr And() {
    ExprPtr e = Unary();
    while (ts_.ConsumePunct("&&")) e = ex::And(e, Unary());
    return e;
  }
  ExprPtr Unary() {
    if (ts_.ConsumePunct("!")) return ex::Not(Unary());
    return Comparison();
  }
  ExprPtr Comparison() {
    ExprPtr a = Additive();
    static const std::pair<const char *, CmpOp> kOps[] = {
        {"==", CmpOp::kEq}, {"!=", CmpOp::kNe}, {"<=", CmpOp::kLe},
        {">=", CmpOp::kGe}, {"<", CmpOp::kLt},  {">", CmpOp::kGt}};
    for (const auto &[sym, op] : kOps)
      if (ts_.ConsumePunct(sym)) return ex::Cmp(op, a, Additive());
    return a;
  }
  ExprPtr Additive() {
    ExprPtr e = Multiplicative();
    while (true) {
      if (ts_.ConsumePunct("+")) e = ex::Bin(BinOp::kAdd, e, Multiplicative());
      else if (ts_.ConsumePunct("-")) e = ex::Bin(BinOp::kSub, e, Multiplicative());
      else return e;
    }
  }
  ExprPtr Multiplicative() {
    ExprPtr e = Primary();
    while (true) {
      Token at = ts_.Peek();
      BinOp op;
      if (ts_.ConsumePunct("*")) op = BinOp::kMul;
      else if (ts_.ConsumePunct("/")) op = BinOp::kDiv;
      else if (ts_.ConsumePunct("%")) op = BinOp::kMod;
      else return e;
      ExprPtr rhs = Primary();
      try {
        e = ex::Bin(op, e, rhs);
      } catch (const Error &err) {
        ts_.FailAt(at, err.what());
      }
    }
  }
  ExprPtr Primary() {
    Token t = ts_.Peek();
    if (ts_.ConsumePunct("(")) {
      ExprPtr e = Or();
      ts_.ExpectPunct(")");
      return e;
    }
    if (ts_.ConsumePunct("-")) {
      Token n = ts_.Next();
      if (n.kind == Token::Kind::kInt) return ex::Int(-n.int_value);
      if (n.kind == Token::Kind::kFloat) return ex::Float(-n.float_value);
      ts_.FailAt(n, "expected a number after '-'");
    }
    switch (t.kind) {
      case Token::Kind::kInt: ts_.Next(); return ex::Int(t.int_value);
      case Token::Kind::kFloat: ts_.Next(); return ex::Float(t.float_value);
      case Token::Kind::kString: ts_.Next(); return ex::Str(t.text);
      case Token::Kind::kIdent: break;
      default: ts_.FailAt(t, "expected a constraint operand");
    }
    ts_.Next();
    if (t.text == "true" || t.text == "false") return ex::Bool(t.text == "true");
    if (!ts_.IsPunct("(")) return vars_.count(t.text) ? ex::Var(t.text) : ex::Attr(t.text);
    ts_.ExpectPunct("(");
    std::string p = ts_.ExpectIdent();
    ExprPtr out;
    if (t.text == "ndim") {
      out = ex::Ndim(p);
    } else if (t.text == "size") {
      out = ex::Size(p);
    } else if (t.text == "dtype") {
      out = ex::DTypeOf(p);
    } else if (t.text == "dim") {
      ts_.ExpectPunct(",");
      out = ex::Dim(p, Or());
    } else if (t.text == "val") {
      std::vector<ExprPtr> idx;
      while (ts_.ConsumePunct(",")) idx.push_back(Or());
      out = ex::Val(p, std::move(idx));
    } else {
      ts_.FailAt(t, "unknown atom '" + t.text + "'");
    }
    ts_.ExpectPunct(")");
    return out;
  }

  TokenStream ts_;
  const std::set<std::string> &vars_;
};

}  // namespace

ExprPtr ParseConstraintExpr(std::string_view text, const std::set<std::string> &vars,
                            const std::string &file, int line) {
  // Leading newlines keep diagnostics on the caller's line numbering.
  std::string padded(static_cast<size_t>(line > 1 ? line - 1 : 0), '\n');
  padded += text;
  return ExprParser(TokenStream(Tokenize(padded, file), file), vars).ParseAll();
}

std::string_view AtomAttribute(const Expr &atom) {
  switch (atom.kind) {
    case ExprKind::kNdim: return "ndim";
    case ExprKind::kDim: return "shape";
    case ExprKind::kSize: return "size";
    case ExprKind::kDType: return "dtype";
    case ExprKind::kVal:
    case ExprKind::kAttr: return "value";
    default: return "";
  }
}

void CollectAtoms(const ExprPtr &e, std::vector<AtomRef> &out) {
  std::string_view attr = AtomAttribute(*e);
  if (!attr.empty()) out.push_back({e->name, std::string(attr)});
  for (const auto &k : e->kids) CollectAtoms(k, out);
}

std::set<std::string> ReferencedParams(const ExprPtr &e) {
  std::vector<AtomRef> atoms;
  CollectAtoms(e, atoms);
  std::set<std::string> out;
  for (const auto &a : atoms) out.insert(a.param);
  return out;
}

}  // namespace opfuzz
