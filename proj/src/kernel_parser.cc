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

// Kernel language front end. Parsing and lowering happen in one pass: every
// expression is emitted into the current block as it is recognized.
//
//   require e, "msg";   ->  br e, cont, fail; fail: require_fail "msg"; halt
//   if e { A } else { B } -> br e, then, else; both arms jmp to a merge block
//   for i in a .. b { S } -> preheader stores, header compare, body, latch

#include <map>
#include <set>

#include "opfuzz/kernel_ir.h"
#include "opfuzz/lexer.h"

namespace opfuzz {

namespace {

struct TypedValue {
  int id = -1;
  VType type = VType::kVoid;
  VType elem = VType::kVoid;  // element type for tensors and addresses
};

struct Local {
  int slot = -1;
  VType type = VType::kVoid;
};

VType ElemVType(const std::vector<DType> &dtypes) {
  bool any_string = false, any_float = false, any_bool = false, any_int = false;
  for (DType d : dtypes) {
    switch (ElemKindOf(d)) {
      case ElemKind::kString: any_string = true; break;
      case ElemKind::kFloat: any_float = true; break;
      case ElemKind::kBool: any_bool = true; break;
      case ElemKind::kInt: any_int = true; break;
      case ElemKind::kHandle: return VType::kHandle;
    }
  }
  int kinds = any_string + any_float + any_bool + any_int;
  if (kinds == 1) {
    if (any_string) return VType::kString;
    if (any_float) return VType::kFloat;
    if (any_bool) return VType::kBool;
    return VType::kInt;
  }
  // Polymorphic over numeric types: loads yield numbers.
  return any_string ? VType::kVoid : VType::kFloat;
}

bool Numeric(VType t) { return t == VType::kInt || t == VType::kFloat; }

class KernelParser {
 public:
  KernelParser(std::string_view src, const std::string &file)
      : ts_(Tokenize(src, file), file) {}

  KernelIR Parse() {
    ts_.ExpectKeyword("kernel");
    ir_.kernel_id = ts_.ExpectIdent();
    ts_.ExpectPunct("{");
    cur_ = NewBlock("entry");
    ParseDecls();
    while (!ts_.IsPunct("}")) {
      if (ts_.AtEnd()) ts_.Fail("unterminated kernel body");
      ParseStmt();
    }
    ts_.ExpectPunct("}");
    if (!ts_.AtEnd()) ts_.Fail("trailing input after kernel");
    Terminate(Opcode::kRet);
    return std::move(ir_);
  }

 private:
  // ---- IR building -------------------------------------------------------

  int NewBlock(const std::string &label) {
    Block b;
    b.id = static_cast<int>(ir_.blocks.size());
    b.label = label;
    ir_.blocks.push_back(std::move(b));
    return ir_.blocks.back().id;
  }

  int Emit(Instr in, VType type) {
    in.line = line_;
    Block &b = ir_.blocks[static_cast<size_t>(cur_)];
    if (type != VType::kVoid) {
      in.result = static_cast<int>(ir_.values.size());
      ir_.values.push_back({cur_, static_cast<int>(b.instrs.size()), type});
    }
    b.instrs.push_back(std::move(in));
    return b.instrs.back().result;
  }

  void Terminate(Opcode op, int t = -1, int f = -1, int cond = -1) {
    Instr in;
    in.op = op;
    in.target_true = t;
    in.target_false = f;
    if (cond >= 0) in.operands = {cond};
    Emit(std::move(in), VType::kVoid);
  }

  TypedValue Const(Scalar v, VType type) {
    Instr in;
    in.op = Opcode::kConst;
    in.imm = std::move(v);
    return {Emit(std::move(in), type), type};
  }

  int NewSlot(const std::string &name) {
    ir_.slots.push_back(name);
    return static_cast<int>(ir_.slots.size()) - 1;
  }

  // ---- declarations ------------------------------------------------------

  std::vector<DType> ParseTensorElems() {
    ts_.ExpectPunct("<");
    std::vector<DType> out;
    do {
      Token t = ts_.Peek();
      std::string e = ts_.ExpectIdent();
      if (e == "i64") out.push_back(DType::kDtInt64);
      else if (e == "f32") out.push_back(DType::kDtFloat);
      else if (e == "str") out.push_back(DType::kDtString);
      else if (e == "bool") out.push_back(DType::kDtBool);
      else ts_.FailAt(t, "unknown tensor element type '" + e + "'");
    } while (ts_.ConsumePunct("|"));
    ts_.ExpectPunct(">");
    return out;
  }

  void ParseDecls() {
    while (ts_.IsIdent("input") || ts_.IsIdent("attr") || ts_.IsIdent("output")) {
      Token kw = ts_.Next();
      std::string name = ts_.ExpectIdent();
      ts_.ExpectPunct(":");
      Token type_tok = ts_.Peek();
      std::string type = ts_.ExpectIdent();
      if (kw.text == "output") {
        std::string spelled = type;
        if (type == "tensor") {
          auto elems = ParseTensorElems();
          spelled += "<" + std::string(DTypeName(elems.front())) + ">";
        } else if (type == "resource") {
          ts_.ExpectPunct("<");
          spelled += "<" + ts_.ExpectIdent() + ">";
          ts_.ExpectPunct(">");
        }
        ts_.ExpectPunct(";");
        ir_.outputs.push_back({name, spelled});
        continue;
      }
      if (ir_.FindParam(name)) ts_.FailAt(kw, "duplicate parameter '" + name + "'");
      KernelParam p;
      p.name = name;
      if (kw.text == "attr") {
        p.role = ParamRole::kAttr;
        p.container = Container::kScalar;
        auto d = DTypeFromName(type);
        if (!d || !IsScalarDType(*d)) ts_.FailAt(type_tok, "attr type must be int, float, string or bool");
        p.dtypes = {*d};
      } else if (type == "tensor") {
        p.dtypes = ParseTensorElems();
      } else if (type == "resource") {
        ts_.ExpectPunct("<");
        p.entity = ts_.ExpectIdent();
        ts_.ExpectPunct(">");
        p.container = Container::kResource;
        p.dtypes = {DType::kDtResource};
      } else if (type == "file") {
        p.container = Container::kFilePath;
        p.dtypes = {DType::kDtString};
      } else {
        ts_.FailAt(type_tok, "unknown input type '" + type + "'");
      }
      ts_.ExpectPunct(";");
      ir_.params.push_back(std::move(p));
    }
  }

  // ---- statements --------------------------------------------------------

  void ParseBlockBody() {
    ts_.ExpectPunct("{");
    while (!ts_.ConsumePunct("}")) {
      if (ts_.AtEnd()) ts_.Fail("unterminated block");
      ParseStmt();
    }
  }

  void ParseStmt() {
    line_ = ts_.Peek().line;
    if (ts_.IsIdent("input") || ts_.IsIdent("attr") || ts_.IsIdent("output"))
      ts_.Fail("declarations must precede statements");
    if (ts_.ConsumeIdent("require")) return ParseRequire();
    if (ts_.ConsumeIdent("if")) return ParseIf();
    if (ts_.ConsumeIdent("for")) return ParseFor();
    if (ts_.ConsumeIdent("emit")) return ParseEmit();
    if (ts_.IsIdent("call")) {
      TypedValue v = ParseCall();
      (void)v;
      ts_.ExpectPunct(";");
      return;
    }
    Token name_tok = ts_.Peek();
    std::string name = ts_.ExpectIdent();
    if (ts_.IsPunct("[")) return ParseTensorStore(name_tok, name);
    ts_.ExpectPunct("=");
    TypedValue v = ParseExpr();
    ts_.ExpectPunct(";");
    Assign(name_tok, name, v);
  }

  void Assign(const Token &at, const std::string &name, const TypedValue &v) {
    if (ir_.FindParam(name)) ts_.FailAt(at, "cannot assign to parameter '" + name + "'");
    if (v.type == VType::kTensor || v.type == VType::kVoid || v.type == VType::kAddr)
      ts_.FailAt(at, "type mismatch: local '" + name + "' must hold a scalar or handle");
    auto it = locals_.find(name);
    if (it == locals_.end()) {
      it = locals_.emplace(name, Local{NewSlot(name), v.type}).first;
    } else if (it->second.type != v.type) {
      ts_.FailAt(at, "type mismatch assigning to local '" + name + "'");
    }
    Instr st;
    st.op = Opcode::kLStore;
    st.slot = it->second.slot;
    st.operands = {v.id};
    Emit(std::move(st), VType::kVoid);
    assigned_.insert(name);
  }

  TypedValue Condition() {
    Token at = ts_.Peek();
    TypedValue c = ParseExpr();
    if (c.type != VType::kBool) ts_.FailAt(at, "type mismatch: condition must be boolean");
    return c;
  }

  void ParseRequire() {
    TypedValue c = Condition();
    ts_.ExpectPunct(",");
    std::string msg = ts_.ExpectString();
    ts_.ExpectPunct(";");
    int check = cur_;
    int fail = NewBlock("require.fail");
    int cont = NewBlock("require.cont");
    Terminate(Opcode::kBr, cont, fail, c.id);
    cur_ = fail;
    Instr rf;
    rf.op = Opcode::kRequireFail;
    rf.name = msg;
    Emit(std::move(rf), VType::kVoid);
    Terminate(Opcode::kHalt);
    cur_ = cont;
    ir_.require_sites.push_back({check, fail, depth_ == 0, msg});
  }

  void ParseIf() {
    TypedValue c = Condition();
    int then_b = NewBlock("if.then");
    int else_b = NewBlock("if.else");
    int merge = NewBlock("if.end");
    Terminate(Opcode::kBr, then_b, else_b, c.id);
    auto before = assigned_;
    ++depth_;
    cur_ = then_b;
    ParseBlockBody();
    Terminate(Opcode::kJmp, merge);
    auto after_then = assigned_;
    assigned_ = before;
    cur_ = else_b;
    if (ts_.ConsumeIdent("else")) {
      if (ts_.ConsumeIdent("if")) {
        ParseIf();
      } else {
        ParseBlockBody();
      }
    }
    Terminate(Opcode::kJmp, merge);
    --depth_;
    std::set<std::string> both;
    for (const auto &n : after_then)
      if (assigned_.count(n)) both.insert(n);
    assigned_ = std::move(both);
    cur_ = merge;
  }

  void ParseFor() {
    Token var_tok = ts_.Peek();
    std::string var = ts_.ExpectIdent();
    if (ir_.FindParam(var)) ts_.FailAt(var_tok, "loop variable shadows parameter '" + var + "'");
    ts_.ExpectKeyword("in");
    Token lo_tok = ts_.Peek();
    TypedValue lo = ParseExpr();
    ts_.ExpectPunct("..");
    TypedValue hi = ParseExpr();
    if (lo.type != VType::kInt || hi.type != VType::kInt)
      ts_.FailAt(lo_tok, "type mismatch: loop bounds must be integers");
    auto it = locals_.find(var);
    if (it == locals_.end()) {
      it = locals_.emplace(var, Local{NewSlot(var), VType::kInt}).first;
    } else if (it->second.type != VType::kInt) {
      ts_.FailAt(var_tok, "type mismatch: loop variable '" + var + "' is not an integer");
    }
    int var_slot = it->second.slot;
    int hi_slot = NewSlot(var + ".hi" + std::to_string(loop_count_++));
    Instr st;
    st.op = Opcode::kLStore;
    st.slot = var_slot;
    st.operands = {lo.id};
    Emit(st, VType::kVoid);
    st.slot = hi_slot;
    st.operands = {hi.id};
    Emit(st, VType::kVoid);
    int header = NewBlock("for.header");
    int body = NewBlock("for.body");
    int exit = NewBlock("for.exit");
    Terminate(Opcode::kJmp, header);
    cur_ = header;
    int iv = LoadSlot(var_slot, VType::kInt);
    int hv = LoadSlot(hi_slot, VType::kInt);
    Instr cmp;
    cmp.op = Opcode::kCmp;
    cmp.cmp = CmpOp::kLt;
    cmp.operands = {iv, hv};
    int c = Emit(std::move(cmp), VType::kBool);
    Terminate(Opcode::kBr, body, exit, c);
    auto before = assigned_;
    ++depth_;
    cur_ = body;
    assigned_.insert(var);
    ParseBlockBody();
    int cur_i = LoadSlot(var_slot, VType::kInt);
    TypedValue one = Const(int64_t{1}, VType::kInt);
    Instr add;
    add.op = Opcode::kBin;
    add.bin = BinOp::kAdd;
    add.operands = {cur_i, one.id};
    int next = Emit(std::move(add), VType::kInt);
    st.slot = var_slot;
    st.operands = {next};
    Emit(st, VType::kVoid);
    Terminate(Opcode::kJmp, header);
    --depth_;
    assigned_ = std::move(before);
    cur_ = exit;
  }

  int LoadSlot(int slot, VType type) {
    Instr ld;
    ld.op = Opcode::kLLoad;
    ld.slot = slot;
    return Emit(std::move(ld), type);
  }

  void ParseEmit() {
    Token name_tok = ts_.Peek();
    std::string name = ts_.ExpectIdent();
    bool declared = false;
    for (const auto &o : ir_.outputs) declared |= o.name == name;
    if (!declared) ts_.FailAt(name_tok, "emit to undeclared output '" + name + "'");
    ts_.ExpectPunct("=");
    TypedValue v = ParseExpr(/*allow_tensor=*/true);
    ts_.ExpectPunct(";");
    if (v.type == VType::kVoid) ts_.FailAt(name_tok, "type mismatch: emit of a void value");
    Instr in;
    in.op = Opcode::kEmit;
    in.name = name;
    in.operands = {v.id};
    Emit(std::move(in), VType::kVoid);
  }

  void ParseTensorStore(const Token &at, const std::string &name) {
    const KernelParam *p = ir_.FindParam(name);
    if (!p) ts_.FailAt(at, "use of undefined tensor '" + name + "'");
    if (p->container != Container::kTensor)
      ts_.FailAt(at, "type mismatch: indexing non-tensor '" + name + "'");
    TypedValue addr = IndexInto(at, *p);
    ts_.ExpectPunct("=");
    TypedValue v = ParseExpr();
    ts_.ExpectPunct(";");
    if (!(v.type == addr.elem || (Numeric(v.type) && Numeric(addr.elem))))
      ts_.FailAt(at, "type mismatch storing into '" + name + "'");
    Instr st;
    st.op = Opcode::kTStore;
    st.operands = {addr.id, v.id};
    Emit(std::move(st), VType::kVoid);
  }

  // ---- expressions -------------------------------------------------------

  TypedValue ParseExpr(bool allow_tensor = false) {
    Token at = ts_.Peek();
    TypedValue v = ParseOr();
    if (!allow_tensor && v.type == VType::kTensor)
      ts_.FailAt(at, "type mismatch: tensor used as a scalar");
    return v;
  }

  TypedValue Logic(LogicOp op, const Token &at, TypedValue a, TypedValue b) {
    if (a.type != VType::kBool || b.type != VType::kBool)
      ts_.FailAt(at, "type mismatch: logical operands must be boolean");
    Instr in;
    in.op = Opcode::kLogic;
    in.logic = op;
    in.operands = {a.id, b.id};
    return {Emit(std::move(in), VType::kBool), VType::kBool};
  }

  TypedValue ParseOr() {
    TypedValue a = ParseAnd();
    while (ts_.IsPunct("||")) {
      Token at = ts_.Next();
      a = Logic(LogicOp::kOr, at, a, ParseAnd());
    }
    return a;
  }

  TypedValue ParseAnd() {
    TypedValue a = ParseEquality();
    while (ts_.IsPunct("&&")) {
      Token at = ts_.Next();
      a = Logic(LogicOp::kAnd, at, a, ParseEquality());
    }
    return a;
  }

  TypedValue Compare(CmpOp op, const Token &at, TypedValue a, TypedValue b) {
    bool ok = (Numeric(a.type) && Numeric(b.type)) ||
              (a.type == b.type && (a.type == VType::kString || a.type == VType::kBool) &&
               (op == CmpOp::kEq || op == CmpOp::kNe));
    if (!ok) ts_.FailAt(at, "type mismatch in comparison");
    Instr in;
    in.op = Opcode::kCmp;
    in.cmp = op;
    in.operands = {a.id, b.id};
    return {Emit(std::move(in), VType::kBool), VType::kBool};
  }

  TypedValue ParseEquality() {
    TypedValue a = ParseRelational();
    while (ts_.IsPunct("==") || ts_.IsPunct("!=")) {
      Token at = ts_.Next();
      a = Compare(at.text == "==" ? CmpOp::kEq : CmpOp::kNe, at, a, ParseRelational());
    }
    return a;
  }

  TypedValue ParseRelational() {
    TypedValue a = ParseAdditive();
    while (ts_.IsPunct("<") || ts_.IsPunct("<=") || ts_.IsPunct(">") || ts_.IsPunct(">=")) {
      Token at = ts_.Next();
      CmpOp op = at.text == "<"    ? CmpOp::kLt
                 : at.text == "<=" ? CmpOp::kLe
                 : at.text == ">"  ? CmpOp::kGt
                                   : CmpOp::kGe;
      a = Compare(op, at, a, ParseAdditive());
    }
    return a;
  }

  TypedValue Arith(BinOp op, const Token &at, TypedValue a, TypedValue b) {
    if (!Numeric(a.type) || !Numeric(b.type))
      ts_.FailAt(at, "type mismatch: arithmetic on non-numeric operands");
    VType t = (a.type == VType::kFloat || b.type == VType::kFloat) ? VType::kFloat : VType::kInt;
    if (op == BinOp::kMod && t != VType::kInt) ts_.FailAt(at, "type mismatch: '%' needs integers");
    Instr in;
    in.op = Opcode::kBin;
    in.bin = op;
    in.operands = {a.id, b.id};
    return {Emit(std::move(in), t), t};
  }

  TypedValue ParseAdditive() {
    TypedValue a = ParseMultiplicative();
    while (ts_.IsPunct("+") || ts_.IsPunct("-")) {
      Token at = ts_.Next();
      a = Arith(at.text == "+" ? BinOp::kAdd : BinOp::kSub, at, a, ParseMultiplicative());
    }
    return a;
  }

  TypedValue ParseMultiplicative() {
    TypedValue a = ParseUnary();
    while (ts_.IsPunct("*") || ts_.IsPunct("/") || ts_.IsPunct("%")) {
      Token at = ts_.Next();
      BinOp op = at.text == "*" ? BinOp::kMul : at.text == "/" ? BinOp::kDiv : BinOp::kMod;
      a = Arith(op, at, a, ParseUnary());
    }
    return a;
  }

  TypedValue ParseUnary() {
    if (ts_.IsPunct("-")) {
      Token at = ts_.Next();
      // Fold negative literals so that -1 is a constant, not 0 - 1.
      if (ts_.Peek().kind == Token::Kind::kInt) {
        Token lit = ts_.Next();
        return Const(-lit.int_value, VType::kInt);
      }
      if (ts_.Peek().kind == Token::Kind::kFloat) {
        Token lit = ts_.Next();
        return Const(-lit.float_value, VType::kFloat);
      }
      TypedValue v = ParseUnary();
      TypedValue zero = v.type == VType::kFloat ? Const(0.0, VType::kFloat)
                                                : Const(int64_t{0}, VType::kInt);
      return Arith(BinOp::kSub, at, zero, v);
    }
    if (ts_.IsPunct("!")) {
      Token at = ts_.Next();
      TypedValue v = ParseUnary();
      if (v.type != VType::kBool) ts_.FailAt(at, "type mismatch: '!' needs a boolean");
      Instr in;
      in.op = Opcode::kLogic;
      in.logic = LogicOp::kNot;
      in.operands = {v.id};
      return {Emit(std::move(in), VType::kBool), VType::kBool};
    }
    return ParsePrimary();
  }

  const KernelParam &TensorParam(const Token &at, const std::string &name) {
    const KernelParam *p = ir_.FindParam(name);
    if (!p) ts_.FailAt(at, "use of undefined tensor '" + name + "'");
    if (p->container != Container::kTensor && p->container != Container::kFilePath)
      ts_.FailAt(at, "type mismatch: '" + name + "' is not a tensor");
    return *p;
  }

  int GetInput(const KernelParam &p) {
    Instr in;
    in.op = Opcode::kGetInput;
    in.name = p.name;
    return Emit(std::move(in),
                p.container == Container::kResource ? VType::kHandle : VType::kTensor);
  }

  TypedValue IndexInto(const Token &at, const KernelParam &p) {
    int t = GetInput(p);
    ts_.ExpectPunct("[");
    std::vector<int> ops{t};
    if (!ts_.IsPunct("]")) {
      do {
        Token it = ts_.Peek();
        TypedValue i = ParseExpr();
        if (i.type != VType::kInt) ts_.FailAt(it, "type mismatch: index must be an integer");
        ops.push_back(i.id);
      } while (ts_.ConsumePunct(","));
    }
    ts_.ExpectPunct("]");
    VType elem = ElemVType(p.dtypes);
    if (elem == VType::kVoid) ts_.FailAt(at, "type mismatch: element access on mixed string tensor");
    Instr in;
    in.op = Opcode::kIndex;
    in.operands = std::move(ops);
    return {Emit(std::move(in), VType::kAddr), VType::kAddr, elem};
  }

  TypedValue ShapeQuery(Opcode op, VType result) {
    ts_.ExpectPunct("(");
    Token at = ts_.Peek();
    std::string name = ts_.ExpectIdent();
    const KernelParam &p = TensorParam(at, name);
    int t = GetInput(p);
    Instr in;
    in.op = op;
    in.operands = {t};
    if (op == Opcode::kDim) {
      ts_.ExpectPunct(",");
      Token it = ts_.Peek();
      TypedValue axis = ParseExpr();
      if (axis.type != VType::kInt) ts_.FailAt(it, "type mismatch: dim axis must be an integer");
      in.operands.push_back(axis.id);
    }
    ts_.ExpectPunct(")");
    return {Emit(std::move(in), result), result};
  }

  TypedValue ParseCall() {
    Token at = ts_.Next();  // 'call'
    std::string verb = ts_.ExpectIdent();
    ts_.ExpectPunct("(");
    std::string entity = ts_.ExpectIdent();
    std::vector<TypedValue> args;
    while (ts_.ConsumePunct(",")) args.push_back(ParseExpr());
    ts_.ExpectPunct(")");
    VType result = VType::kVoid;
    size_t handle_args = 0;
    if (verb == "New" || verb == "Create") {
      result = VType::kHandle;
    } else if (verb == "Push" || verb == "Enqueue") {
      handle_args = 1;
      if (args.size() != 2) ts_.FailAt(at, verb + " takes a handle and a value");
    } else if (verb == "Pop" || verb == "Dequeue" || verb == "Size") {
      handle_args = 1;
      result = VType::kInt;
      if (args.size() != 1) ts_.FailAt(at, verb + " takes one handle");
    } else if (verb == "Close") {
      handle_args = 1;
      if (args.size() != 1) ts_.FailAt(at, "Close takes one handle");
    } else if (verb == "Open") {
      result = VType::kInt;
      if (args.size() != 1 || args[0].type != VType::kString)
        ts_.FailAt(at, "Open takes one string path");
    } else {
      ts_.FailAt(at, "unknown resource verb '" + verb + "'");
    }
    for (size_t i = 0; i < handle_args; ++i)
      if (args[i].type != VType::kHandle)
        ts_.FailAt(at, "type mismatch: " + verb + " expects a resource handle");
    Instr in;
    in.op = Opcode::kResCall;
    in.name = verb;
    in.entity = entity;
    for (const auto &a : args) in.operands.push_back(a.id);
    return {Emit(std::move(in), result), result};
  }

  TypedValue ParsePrimary() {
    Token t = ts_.Peek();
    switch (t.kind) {
      case Token::Kind::kInt:
        ts_.Next();
        return Const(t.int_value, VType::kInt);
      case Token::Kind::kFloat:
        ts_.Next();
        return Const(t.float_value, VType::kFloat);
      case Token::Kind::kString:
        ts_.Next();
        return Const(t.text, VType::kString);
      case Token::Kind::kPunct:
        if (ts_.ConsumePunct("(")) {
          TypedValue v = ParseExpr();
          ts_.ExpectPunct(")");
          return v;
        }
        ts_.Fail("expected expression");
      case Token::Kind::kEnd:
        ts_.Fail("expected expression");
      case Token::Kind::kIdent:
        break;
    }
    if (t.text == "call") return ParseCall();
    if (t.text == "true" || t.text == "false") {
      ts_.Next();
      return Const(int64_t{t.text == "true"}, VType::kBool);
    }
    if (ts_.IsPunct("(", 1)) {
      if (t.text == "rank") return ts_.Next(), ShapeQuery(Opcode::kRank, VType::kInt);
      if (t.text == "size") return ts_.Next(), ShapeQuery(Opcode::kSize, VType::kInt);
      if (t.text == "dim") return ts_.Next(), ShapeQuery(Opcode::kDim, VType::kInt);
      if (t.text == "dtype") return ts_.Next(), ShapeQuery(Opcode::kDType, VType::kString);
      if (t.text == "len") {
        ts_.Next();
        ts_.ExpectPunct("(");
        TypedValue s = ParseExpr();
        ts_.ExpectPunct(")");
        if (s.type != VType::kString) ts_.FailAt(t, "type mismatch: len() needs a string");
        Instr in;
        in.op = Opcode::kLen;
        in.operands = {s.id};
        return {Emit(std::move(in), VType::kInt), VType::kInt};
      }
      ts_.FailAt(t, "unknown function '" + t.text + "'");
    }
    ts_.Next();
    if (const KernelParam *p = ir_.FindParam(t.text)) {
      if (ts_.IsPunct("[")) {
        if (p->container != Container::kTensor && p->container != Container::kFilePath)
          ts_.FailAt(t, "type mismatch: indexing non-tensor '" + t.text + "'");
        TypedValue addr = IndexInto(t, *p);
        Instr ld;
        ld.op = Opcode::kTLoad;
        ld.operands = {addr.id};
        return {Emit(std::move(ld), addr.elem), addr.elem};
      }
      if (p->role == ParamRole::kAttr) {
        Instr in;
        in.op = Opcode::kGetAttr;
        in.name = p->name;
        VType vt = ElemVType(p->dtypes);
        return {Emit(std::move(in), vt), vt};
      }
      if (p->container == Container::kResource) return {GetInput(*p), VType::kHandle};
      return {GetInput(*p), VType::kTensor, ElemVType(p->dtypes)};
    }
    if (ts_.IsPunct("[")) ts_.FailAt(t, "type mismatch: indexing scalar '" + t.text + "'");
    auto it = locals_.find(t.text);
    if (it == locals_.end()) ts_.FailAt(t, "use of undefined name '" + t.text + "'");
    if (!assigned_.count(t.text))
      ts_.FailAt(t, "use of '" + t.text + "' before definition on some path");
    return {LoadSlot(it->second.slot, it->second.type), it->second.type};
  }

  TokenStream ts_;
  KernelIR ir_;
  int cur_ = 0;
  int depth_ = 0;
  int line_ = 0;
  int loop_count_ = 0;
  std::map<std::string, Local> locals_;
  std::set<std::string> assigned_;
};

}  // namespace

KernelIR ParseKernel(std::string_view source, const std::string &file) {
  return KernelParser(source, file).Parse();
}

}  // namespace opfuzz
