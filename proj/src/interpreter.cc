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

#include "opfuzz/interpreter.h"

#include <cmath>
#include <limits>
#include <variant>

namespace opfuzz {

std::string_view CrashKindName(CrashKind k) {
  switch (k) {
    case CrashKind::kOOB: return "OOB";
    case CrashKind::kNPE: return "NPE";
    case CrashKind::kFPE: return "FPE";
    case CrashKind::kIOF: return "IOF";
    case CrashKind::kUAF: return "UAF";
  }
  return "?";
}

std::optional<CrashKind> CrashKindFromName(std::string_view name) {
  for (CrashKind k : {CrashKind::kOOB, CrashKind::kNPE, CrashKind::kFPE, CrashKind::kIOF,
                      CrashKind::kUAF})
    if (CrashKindName(k) == name) return k;
  return std::nullopt;
}

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kSuccess: return "success";
    case Verdict::kValidationReject: return "reject";
    case Verdict::kCrash: return "crash";
  }
  return "?";
}

int64_t HandleTable::Create(const std::string &entity) {
  int64_t id = next_id_++;
  entries_[id] = Entry{entity, true, {}};
  return id;
}

void HandleTable::Close(int64_t id) {
  if (auto *e = FindMutable(id)) {
    e->open = false;
    e->items.clear();
  }
}

const HandleTable::Entry *HandleTable::Find(int64_t id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

HandleTable::Entry *HandleTable::FindMutable(int64_t id) {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<int64_t> HandleTable::Ids(const std::string &entity, bool open) const {
  std::vector<int64_t> out;
  for (const auto &[id, e] : entries_)
    if (e.entity == entity && e.open == open) out.push_back(id);
  return out;
}

namespace {

struct TensorRef {
  int param = -1;
};
struct HandleVal {
  int64_t id = 0;
};
struct AddrVal {
  int param = -1;
  std::vector<int64_t> idx;
};

using RtValue =
    std::variant<std::monostate, int64_t, double, std::string, TensorRef, HandleVal, AddrVal>;

RtValue FromScalar(const Scalar &s) {
  return std::visit([](const auto &v) -> RtValue { return v; }, s);
}

// Raised inside the interpreter loop; converted into an ExecOutcome.
struct Trap {
  Verdict verdict;
  CrashKind kind;
  std::string message;
};

[[noreturn]] void Crash(CrashKind k, std::string msg) {
  throw Trap{Verdict::kCrash, k, std::move(msg)};
}

double AsDouble(const RtValue &v) {
  if (const auto *i = std::get_if<int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

bool IsInt(const RtValue &v) { return std::holds_alternative<int64_t>(v); }

int64_t AsInt(const RtValue &v) {
  if (const auto *i = std::get_if<int64_t>(&v)) return *i;
  if (const auto *d = std::get_if<double>(&v)) return static_cast<int64_t>(*d);
  Crash(CrashKind::kNPE, "non-numeric value used as integer");
}

RtValue EvalBin(BinOp op, const RtValue &a, const RtValue &b) {
  if (IsInt(a) && IsInt(b)) {
    int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
    std::optional<int64_t> r;
    switch (op) {
      case BinOp::kAdd: r = CheckedAdd(x, y); break;
      case BinOp::kSub: r = CheckedSub(x, y); break;
      case BinOp::kMul: r = CheckedMul(x, y); break;
      case BinOp::kDiv:
      case BinOp::kMod:
        if (y == 0) Crash(CrashKind::kFPE, "integer division by zero");
        if (x == std::numeric_limits<int64_t>::min() && y == -1)
          Crash(CrashKind::kIOF, "signed division overflow");
        r = op == BinOp::kDiv ? x / y : x % y;
        break;
    }
    if (!r) Crash(CrashKind::kIOF, "64-bit signed overflow in '" + std::string(BinOpSymbol(op)) + "'");
    return *r;
  }
  double x = AsDouble(a), y = AsDouble(b);
  switch (op) {
    case BinOp::kAdd: return x + y;
    case BinOp::kSub: return x - y;
    case BinOp::kMul: return x * y;
    case BinOp::kDiv:
      if (y == 0) Crash(CrashKind::kFPE, "floating-point division by zero");
      return x / y;
    case BinOp::kMod:
      if (y == 0) Crash(CrashKind::kFPE, "floating-point division by zero");
      return std::fmod(x, y);
  }
  return 0.0;
}

bool EvalCmp(CmpOp op, const RtValue &a, const RtValue &b) {
  if (const auto *sa = std::get_if<std::string>(&a)) {
    const auto &sb = std::get<std::string>(b);
    return op == CmpOp::kEq ? *sa == sb : *sa != sb;
  }
  bool ints = IsInt(a) && IsInt(b);
  auto cmp3 = [&]() -> int {
    if (ints) {
      int64_t x = std::get<int64_t>(a), y = std::get<int64_t>(b);
      return x < y ? -1 : x > y ? 1 : 0;
    }
    double x = AsDouble(a), y = AsDouble(b);
    return x < y ? -1 : x > y ? 1 : 0;
  };
  int c = cmp3();
  switch (op) {
    case CmpOp::kEq: return c == 0;
    case CmpOp::kNe: return c != 0;
    case CmpOp::kLt: return c < 0;
    case CmpOp::kLe: return c <= 0;
    case CmpOp::kGt: return c > 0;
    case CmpOp::kGe: return c >= 0;
  }
  return false;
}

bool ScalarMatches(const Scalar &s, ElemKind kind) {
  switch (kind) {
    case ElemKind::kInt:
    case ElemKind::kBool:
      return std::holds_alternative<int64_t>(s);
    case ElemKind::kFloat:
      return std::holds_alternative<double>(s);
    case ElemKind::kString:
      return std::holds_alternative<std::string>(s);
    case ElemKind::kHandle:
      return false;
  }
  return false;
}

class Machine {
 public:
  Machine(const KernelIR &k, const TestInput &b, ExecEnv &env) : k_(k), b_(b), env_(env) {
    if (!env_.handles) env_.handles = &own_handles_;
    values_.resize(k_.values.size());
    slots_.resize(k_.slots.size());
    tensors_.resize(k_.params.size(), nullptr);
    written_.resize(k_.params.size());
    for (size_t i = 0; i < k_.params.size(); ++i)
      if (const ParamValue *pv = b_.Find(k_.params[i].name))
        if (const auto *t = std::get_if<TensorVal>(pv)) tensors_[i] = t;
  }

  ExecOutcome Run() {
    ExecOutcome out;
    out.kernel_id = k_.kernel_id;
    int block = k_.entry;
    size_t ip = 0;
    int64_t steps = 0;
    out.covered.insert(block);
    try {
      while (true) {
        const Block &bb = k_.blocks[static_cast<size_t>(block)];
        const Instr &in = bb.instrs[ip];
        out.block = block;
        out.instr = static_cast<int>(ip);
        if (++steps > env_.max_steps) {
          out.truncated = true;
          break;
        }
        if (in.op == Opcode::kBr || in.op == Opcode::kJmp) {
          int next = in.target_true;
          if (in.op == Opcode::kBr && !AsInt(Val(in.operands[0]))) next = in.target_false;
          block = next;
          ip = 0;
          out.covered.insert(block);
          continue;
        }
        if (in.op == Opcode::kRet || in.op == Opcode::kHalt) break;
        if (in.op == Opcode::kRequireFail) {
          out.verdict = Verdict::kValidationReject;
          out.message = in.name;
          return out;
        }
        Step(in, out);
        ++ip;
      }
    } catch (const Trap &t) {
      out.verdict = t.verdict;
      out.kind = t.kind;
      out.message = t.message;
      out.outputs.clear();
      return out;
    }
    out.verdict = Verdict::kSuccess;
    out.block = -1;
    out.instr = -1;
    return out;
  }

 private:
  const RtValue &Val(int id) const { return values_[static_cast<size_t>(id)]; }

  int ParamIndex(const std::string &name) const {
    for (size_t i = 0; i < k_.params.size(); ++i)
      if (k_.params[i].name == name) return static_cast<int>(i);
    return -1;
  }

  const TensorVal &Tensor(int param) const {
    const auto &w = written_[static_cast<size_t>(param)];
    if (w) return *w;
    return *tensors_[static_cast<size_t>(param)];
  }

  int64_t CheckedFlat(const AddrVal &a) const {
    const TensorVal &t = Tensor(a.param);
    if (t.empty())
      Crash(CrashKind::kNPE, "element access on empty tensor '" +
                                 k_.params[static_cast<size_t>(a.param)].name + "'");
    auto flat = t.FlatIndex(a.idx);
    if (!flat)
      Crash(CrashKind::kOOB, "index out of bounds on '" +
                                 k_.params[static_cast<size_t>(a.param)].name + "'");
    return *flat;
  }

  HandleTable::Entry &LiveHandle(const RtValue &v, const std::string &entity) {
    int64_t id = std::get<HandleVal>(v).id;
    HandleTable::Entry *e = env_.handles->FindMutable(id);
    if (!e || e->entity != entity) Crash(CrashKind::kNPE, "null or unknown " + entity + " handle");
    if (!e->open) Crash(CrashKind::kUAF, "use of closed " + entity + " handle");
    return *e;
  }

  void Step(const Instr &in, ExecOutcome &out) {
    RtValue r;
    switch (in.op) {
      case Opcode::kConst:
        r = FromScalar(in.imm);
        break;
      case Opcode::kGetInput: {
        int p = ParamIndex(in.name);
        const KernelParam &kp = k_.params[static_cast<size_t>(p)];
        if (kp.container == Container::kResource) {
          r = HandleVal{std::get<HandleRef>(*b_.Find(kp.name)).id};
        } else {
          r = TensorRef{p};
        }
        break;
      }
      case Opcode::kGetAttr:
        r = FromScalar(std::get<Scalar>(*b_.Find(in.name)));
        break;
      case Opcode::kIndex: {
        AddrVal a;
        a.param = std::get<TensorRef>(Val(in.operands[0])).param;
        for (size_t i = 1; i < in.operands.size(); ++i) a.idx.push_back(AsInt(Val(in.operands[i])));
        r = std::move(a);
        break;
      }
      case Opcode::kTLoad: {
        const auto &a = std::get<AddrVal>(Val(in.operands[0]));
        r = FromScalar(Tensor(a.param).At(CheckedFlat(a)));
        break;
      }
      case Opcode::kTStore: {
        const auto &a = std::get<AddrVal>(Val(in.operands[0]));
        int64_t flat = CheckedFlat(a);
        auto &w = written_[static_cast<size_t>(a.param)];
        if (!w) w = *tensors_[static_cast<size_t>(a.param)];
        const RtValue &v = Val(in.operands[1]);
        Scalar s;
        if (ElemKindOf(w->dtype()) == ElemKind::kFloat) s = AsDouble(v);
        else if (const auto *str = std::get_if<std::string>(&v)) s = *str;
        else s = AsInt(v);
        w->Set(flat, std::move(s));
        return;
      }
      case Opcode::kLLoad:
        r = slots_[static_cast<size_t>(in.slot)];
        break;
      case Opcode::kLStore:
        slots_[static_cast<size_t>(in.slot)] = Val(in.operands[0]);
        return;
      case Opcode::kBin:
        r = EvalBin(in.bin, Val(in.operands[0]), Val(in.operands[1]));
        break;
      case Opcode::kCmp:
        r = int64_t{EvalCmp(in.cmp, Val(in.operands[0]), Val(in.operands[1]))};
        break;
      case Opcode::kLogic: {
        bool a = AsInt(Val(in.operands[0])) != 0;
        if (in.logic == LogicOp::kNot) {
          r = int64_t{!a};
        } else {
          bool b = AsInt(Val(in.operands[1])) != 0;
          r = int64_t{in.logic == LogicOp::kAnd ? (a && b) : (a || b)};
        }
        break;
      }
      case Opcode::kRank:
        r = Tensor(std::get<TensorRef>(Val(in.operands[0])).param).rank();
        break;
      case Opcode::kDim: {
        const TensorVal &t = Tensor(std::get<TensorRef>(Val(in.operands[0])).param);
        int64_t axis = AsInt(Val(in.operands[1]));
        if (axis < 0 || axis >= t.rank()) Crash(CrashKind::kOOB, "dim axis out of range");
        r = t.shape()[static_cast<size_t>(axis)];
        break;
      }
      case Opcode::kSize: {
        auto n = Tensor(std::get<TensorRef>(Val(in.operands[0])).param).size();
        if (!n) Crash(CrashKind::kIOF, "element count overflows int64");
        r = *n;
        break;
      }
      case Opcode::kDType:
        r = std::string(DTypeName(Tensor(std::get<TensorRef>(Val(in.operands[0])).param).dtype()));
        break;
      case Opcode::kLen:
        r = static_cast<int64_t>(std::get<std::string>(Val(in.operands[0])).size());
        break;
      case Opcode::kResCall:
        r = ResCall(in);
        break;
      case Opcode::kEmit: {
        const RtValue &v = Val(in.operands[0]);
        if (const auto *t = std::get_if<TensorRef>(&v)) out.outputs[in.name] = Tensor(t->param);
        else if (const auto *h = std::get_if<HandleVal>(&v)) out.outputs[in.name] = HandleRef{h->id};
        else if (const auto *i = std::get_if<int64_t>(&v)) out.outputs[in.name] = Scalar{*i};
        else if (const auto *d = std::get_if<double>(&v)) out.outputs[in.name] = Scalar{*d};
        else if (const auto *s = std::get_if<std::string>(&v)) out.outputs[in.name] = Scalar{*s};
        return;
      }
      default:
        return;
    }
    if (in.result >= 0) values_[static_cast<size_t>(in.result)] = std::move(r);
  }

  RtValue ResCall(const Instr &in) {
    const std::string &verb = in.name;
    if (verb == "New" || verb == "Create") return HandleVal{env_.handles->Create(in.entity)};
    if (verb == "Open") {
      const auto &path = std::get<std::string>(Val(in.operands[0]));
      auto it = env_.files.find(path);
      if (it == env_.files.end())
        throw Trap{Verdict::kValidationReject, CrashKind::kNPE, "file not found: " + path};
      return it->second;
    }
    HandleTable::Entry &e = LiveHandle(Val(in.operands[0]), in.entity);
    if (verb == "Push" || verb == "Enqueue") {
      const RtValue &v = Val(in.operands[1]);
      e.items.push_back(IsInt(v) ? Scalar{std::get<int64_t>(v)} : Scalar{AsDouble(v)});
      return std::monostate{};
    }
    if (verb == "Pop" || verb == "Dequeue") {
      if (e.items.empty()) return int64_t{0};
      Scalar s;
      if (verb == "Pop") {
        s = e.items.back();
        e.items.pop_back();
      } else {
        s = e.items.front();
        e.items.erase(e.items.begin());
      }
      return IsNumeric(s) && std::holds_alternative<int64_t>(s) ? RtValue{std::get<int64_t>(s)}
                                                                 : RtValue{AsInt(FromScalar(s))};
    }
    if (verb == "Size") return static_cast<int64_t>(e.items.size());
    if (verb == "Close") {
      env_.handles->Close(std::get<HandleVal>(Val(in.operands[0])).id);
      return std::monostate{};
    }
    return std::monostate{};
  }

  const KernelIR &k_;
  const TestInput &b_;
  ExecEnv &env_;
  HandleTable own_handles_;
  std::vector<RtValue> values_;
  std::vector<RtValue> slots_;
  std::vector<const TensorVal *> tensors_;
  std::vector<std::optional<TensorVal>> written_;
};

}  // namespace

std::optional<std::string> CheckBindingTypes(const KernelIR &kernel, const TestInput &binding) {
  for (const auto &p : kernel.params) {
    const ParamValue *v = binding.Find(p.name);
    if (!v) throw Error("binding for kernel " + kernel.kernel_id + " misses parameter '" + p.name + "'");
    switch (p.container) {
      case Container::kScalar: {
        const auto *s = std::get_if<Scalar>(v);
        if (!s || !ScalarMatches(*s, ElemKindOf(p.dtypes.front())))
          return "TypeError: attr '" + p.name + "' expects " +
                 std::string(DTypeName(p.dtypes.front()));
        break;
      }
      case Container::kTensor:
      case Container::kFilePath: {
        const auto *t = std::get_if<TensorVal>(v);
        bool ok = false;
        if (t)
          for (DType d : p.dtypes) ok |= t->dtype() == d;
        if (!ok) return "TypeError: input '" + p.name + "' has an unsupported dtype";
        break;
      }
      case Container::kResource:
        if (!std::holds_alternative<HandleRef>(*v))
          return "TypeError: input '" + p.name + "' expects a resource handle";
        break;
    }
  }
  return std::nullopt;
}

namespace {

// Symbolic evaluation of a shape-category guard. nullopt when a value cannot
// be decided without running the body (traps included).
std::optional<RtValue> EvalShape(const KernelIR &k, const TestInput &b, int value) {
  const Instr &in = k.Def(value);
  auto tensor = [&](int v) -> const TensorVal * {
    const Instr &d = k.Def(v);
    const ParamValue *pv = b.Find(d.name);
    return pv ? std::get_if<TensorVal>(pv) : nullptr;
  };
  try {
    switch (in.op) {
      case Opcode::kConst:
        return FromScalar(in.imm);
      case Opcode::kGetAttr:
        return FromScalar(std::get<Scalar>(*b.Find(in.name)));
      case Opcode::kRank: {
        const TensorVal *t = tensor(in.operands[0]);
        if (!t) return std::nullopt;
        return RtValue{t->rank()};
      }
      case Opcode::kSize: {
        const TensorVal *t = tensor(in.operands[0]);
        if (!t || !t->size()) return std::nullopt;
        return RtValue{*t->size()};
      }
      case Opcode::kDim: {
        const TensorVal *t = tensor(in.operands[0]);
        auto axis = EvalShape(k, b, in.operands[1]);
        if (!t || !axis) return std::nullopt;
        int64_t a = AsInt(*axis);
        if (a < 0 || a >= t->rank()) return std::nullopt;
        return RtValue{t->shape()[static_cast<size_t>(a)]};
      }
      case Opcode::kBin: {
        auto x = EvalShape(k, b, in.operands[0]), y = EvalShape(k, b, in.operands[1]);
        if (!x || !y) return std::nullopt;
        return EvalBin(in.bin, *x, *y);
      }
      case Opcode::kCmp: {
        auto x = EvalShape(k, b, in.operands[0]), y = EvalShape(k, b, in.operands[1]);
        if (!x || !y) return std::nullopt;
        return RtValue{int64_t{EvalCmp(in.cmp, *x, *y)}};
      }
      case Opcode::kLogic: {
        auto x = EvalShape(k, b, in.operands[0]);
        if (!x) return std::nullopt;
        if (in.logic == LogicOp::kNot) return RtValue{int64_t{AsInt(*x) == 0}};
        auto y = EvalShape(k, b, in.operands[1]);
        if (!y) return std::nullopt;
        bool l = AsInt(*x) != 0, r = AsInt(*y) != 0;
        return RtValue{int64_t{in.logic == LogicOp::kAnd ? (l && r) : (l || r)}};
      }
      default:
        return std::nullopt;
    }
  } catch (const Trap &) {
    return std::nullopt;
  }
}

bool ShapeOnly(const KernelIR &k, int value, bool under_shape_query) {
  const Instr &in = k.Def(value);
  switch (in.op) {
    case Opcode::kConst:
    case Opcode::kGetAttr:
      return true;
    case Opcode::kGetInput:
      return under_shape_query;
    case Opcode::kRank:
    case Opcode::kSize:
      return ShapeOnly(k, in.operands[0], true);
    case Opcode::kDim:
      return ShapeOnly(k, in.operands[0], true) && ShapeOnly(k, in.operands[1], false);
    case Opcode::kBin:
    case Opcode::kCmp:
    case Opcode::kLogic:
      for (int op : in.operands)
        if (!ShapeOnly(k, op, false)) return false;
      return true;
    default:
      return false;
  }
}

}  // namespace

bool IsShapeCategoryRequire(const KernelIR &kernel, const RequireSite &site) {
  const Instr &br = kernel.blocks[static_cast<size_t>(site.block)].terminator();
  if (br.op != Opcode::kBr) return false;
  // Shape category needs at least one shape query in the guard.
  bool has_query = false;
  std::vector<int> stack{br.operands[0]};
  while (!stack.empty()) {
    const Instr &in = kernel.Def(stack.back());
    stack.pop_back();
    has_query |= in.op == Opcode::kRank || in.op == Opcode::kSize || in.op == Opcode::kDim;
    if (in.op != Opcode::kGetInput)
      for (int op : in.operands) stack.push_back(op);
  }
  return has_query && ShapeOnly(kernel, br.operands[0], false);
}

std::optional<ExecOutcome> ShapeInferPrepass(const KernelIR &kernel, const TestInput &binding) {
  for (const auto &site : kernel.require_sites) {
    if (!site.top_level || !IsShapeCategoryRequire(kernel, site)) continue;
    const Instr &br = kernel.blocks[static_cast<size_t>(site.block)].terminator();
    auto v = EvalShape(kernel, binding, br.operands[0]);
    if (!v || AsInt(*v) != 0) continue;
    ExecOutcome out;
    out.kernel_id = kernel.kernel_id;
    out.verdict = Verdict::kValidationReject;
    out.message = site.message;
    out.block = site.fail_block;
    out.instr = 0;
    out.covered.insert(kernel.entry);
    return out;
  }
  return std::nullopt;
}

ExecOutcome Execute(const KernelIR &kernel, const TestInput &binding, ExecMode mode,
                    ExecEnv &env) {
  if (auto type_error = CheckBindingTypes(kernel, binding)) {
    ExecOutcome out;
    out.kernel_id = kernel.kernel_id;
    out.verdict = Verdict::kValidationReject;
    out.message = *type_error;
    out.block = kernel.entry;
    out.instr = 0;
    out.covered.insert(kernel.entry);
    return out;
  }
  if (mode == ExecMode::kGraph)
    if (auto early = ShapeInferPrepass(kernel, binding)) return *early;
  return Machine(kernel, binding, env).Run();
}

ExecOutcome Execute(const KernelIR &kernel, const TestInput &binding, ExecMode mode) {
  ExecEnv env;
  return Execute(kernel, binding, mode, env);
}

}  // namespace opfuzz
