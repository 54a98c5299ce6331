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

#ifndef OPFUZZ_CONSTRAINT_EXPR_H_
#define OPFUZZ_CONSTRAINT_EXPR_H_

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/kernel_ir.h"

namespace opfuzz {

// Lifted predicate language over frontend parameter names.
enum class ExprKind {
  kInt,
  kFloat,
  kStr,
  kBool,
  kAttr,   // scalar attr (or rank-0 input) referenced by name
  kVar,    // forall index variable
  kNdim,   // ndim(p)
  kDim,    // dim(p, axis)
  kSize,   // size(p)
  kVal,    // val(p, idx...)
  kDType,  // dtype(p)
  kBin,
  kCmp,
  kLogic,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind = ExprKind::kInt;
  int64_t ival = 0;
  double fval = 0;
  std::string name;  // param, variable, or string literal
  BinOp bin = BinOp::kAdd;
  CmpOp cmp = CmpOp::kEq;
  LogicOp logic = LogicOp::kAnd;
  std::vector<ExprPtr> kids;

  bool IsLiteral() const {
    return kind == ExprKind::kInt || kind == ExprKind::kFloat || kind == ExprKind::kStr ||
           kind == ExprKind::kBool;
  }
  bool IsAtom() const { return kind != ExprKind::kBin && kind != ExprKind::kCmp && kind != ExprKind::kLogic; }
  bool IsBoolean() const {
    return kind == ExprKind::kCmp || kind == ExprKind::kLogic || kind == ExprKind::kBool;
  }
};

namespace ex {
ExprPtr Int(int64_t v);
ExprPtr Float(double v);
ExprPtr Str(std::string v);
ExprPtr Bool(bool v);
ExprPtr Attr(std::string param);
ExprPtr Var(std::string var);
ExprPtr Ndim(std::string param);
ExprPtr Dim(std::string param, ExprPtr axis);
ExprPtr Size(std::string param);
ExprPtr Val(std::string param, std::vector<ExprPtr> idx);
ExprPtr DTypeOf(std::string param);
// Throws Error on a literal-zero divisor.
ExprPtr Bin(BinOp op, ExprPtr a, ExprPtr b);
ExprPtr Cmp(CmpOp op, ExprPtr a, ExprPtr b);
ExprPtr And(ExprPtr a, ExprPtr b);
ExprPtr Or(ExprPtr a, ExprPtr b);
ExprPtr Not(ExprPtr a);
}  // namespace ex

std::string Print(const ExprPtr &e);

// `!(a op b)` == `a NegateCmp(op) b`;  `a op b` == `b SwapCmp(op) a`.
CmpOp NegateCmp(CmpOp op);
CmpOp SwapCmp(CmpOp op);

// Constant folding, double-negation removal and comparison canonicalization:
// `a < b` becomes `b > a`, `a <= b` becomes `b >= a`, and the operands of
// == / != are ordered so the lexicographically smaller printed side is left.
ExprPtr Normalize(const ExprPtr &e);

// Splits top-level conjunctions into their conjuncts.
std::vector<ExprPtr> Conjuncts(const ExprPtr &e);

// Parses the printed form. Identifiers in `vars` are index variables; other
// bare identifiers are attr references.
ExprPtr ParseConstraintExpr(std::string_view text, const std::set<std::string> &vars = {},
                            const std::string &file = "<expr>", int line = 1);

// Frontend attribute of an atom: ndim, shape, size, value or dtype.
std::string_view AtomAttribute(const Expr &atom);

struct AtomRef {
  std::string param;
  std::string attribute;
};
// Parameter atoms in printed (left-to-right) order.
void CollectAtoms(const ExprPtr &e, std::vector<AtomRef> &out);
std::set<std::string> ReferencedParams(const ExprPtr &e);

}  // namespace opfuzz

#endif  // OPFUZZ_CONSTRAINT_EXPR_H_
