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

#include "opfuzz/kernel_ir.h"

#include <sstream>

namespace opfuzz {

std::string_view OpcodeName(Opcode op) {
  switch (op) {
    case Opcode::kConst: return "const";
    case Opcode::kGetInput: return "get_input";
    case Opcode::kGetAttr: return "get_attr";
    case Opcode::kIndex: return "index";
    case Opcode::kTLoad: return "tload";
    case Opcode::kTStore: return "tstore";
    case Opcode::kLLoad: return "lload";
    case Opcode::kLStore: return "lstore";
    case Opcode::kBin: return "bin";
    case Opcode::kCmp: return "cmp";
    case Opcode::kLogic: return "logic";
    case Opcode::kRank: return "rank";
    case Opcode::kDim: return "dim";
    case Opcode::kSize: return "size";
    case Opcode::kDType: return "dtype";
    case Opcode::kLen: return "len";
    case Opcode::kResCall: return "res_call";
    case Opcode::kEmit: return "emit";
    case Opcode::kRequireFail: return "require_fail";
    case Opcode::kBr: return "br";
    case Opcode::kJmp: return "jmp";
    case Opcode::kHalt: return "halt";
    case Opcode::kRet: return "ret";
  }
  return "?";
}

std::string_view BinOpSymbol(BinOp op) {
  switch (op) {
    case BinOp::kAdd: return "+";
    case BinOp::kSub: return "-";
    case BinOp::kMul: return "*";
    case BinOp::kDiv: return "/";
    case BinOp::kMod: return "%";
  }
  return "?";
}

std::string_view CmpOpSymbol(CmpOp op) {
  switch (op) {
    case CmpOp::kEq: return "==";
    case CmpOp::kNe: return "!=";
    case CmpOp::kLt: return "<";
    case CmpOp::kLe: return "<=";
    case CmpOp::kGt: return ">";
    case CmpOp::kGe: return ">=";
  }
  return "?";
}

std::string_view LogicOpSymbol(LogicOp op) {
  switch (op) {
    case LogicOp::kAnd: return "&&";
    case LogicOp::kOr: return "||";
    case LogicOp::kNot: return "!";
  }
  return "?";
}

std::vector<int> Block::Successors() const {
  if (instrs.empty()) return {};
  const Instr &t = terminator();
  if (t.op == Opcode::kBr) return {t.target_true, t.target_false};
  if (t.op == Opcode::kJmp) return {t.target_true};
  return {};
}

const KernelParam *KernelIR::FindParam(std::string_view name) const {
  for (const auto &p : params)
    if (p.name == name) return &p;
  return nullptr;
}

const Instr &KernelIR::Def(int value) const {
  const ValueDef &d = values.at(static_cast<size_t>(value));
  return blocks[static_cast<size_t>(d.block)].instrs[static_cast<size_t>(d.instr)];
}

std::string KernelIR::Dump() const {
  std::ostringstream os;
  os << "kernel " << kernel_id << "\n";
  for (const auto &b : blocks) {
    os << "b" << b.id << " (" << b.label << "):\n";
    for (const auto &in : b.instrs) {
      os << "  ";
      if (in.result >= 0) os << "%" << in.result << " = ";
      os << OpcodeName(in.op);
      switch (in.op) {
        case Opcode::kConst: os << " " << ScalarToString(in.imm); break;
        case Opcode::kGetInput:
        case Opcode::kGetAttr:
        case Opcode::kEmit: os << " " << in.name; break;
        case Opcode::kBin: os << " " << BinOpSymbol(in.bin); break;
        case Opcode::kCmp: os << " " << CmpOpSymbol(in.cmp); break;
        case Opcode::kLogic: os << " " << LogicOpSymbol(in.logic); break;
        case Opcode::kLLoad:
        case Opcode::kLStore: os << " $" << slots[static_cast<size_t>(in.slot)]; break;
        case Opcode::kResCall: os << " " << in.name << "(" << in.entity << ")"; break;
        case Opcode::kRequireFail: os << " \"" << in.name << "\""; break;
        default: break;
      }
      for (int v : in.operands) os << " %" << v;
      if (in.op == Opcode::kBr) os << ", b" << in.target_true << ", b" << in.target_false;
      if (in.op == Opcode::kJmp) os << " b" << in.target_true;
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace opfuzz
