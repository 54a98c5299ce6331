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

#ifndef OPFUZZ_KERNEL_IR_H_
#define OPFUZZ_KERNEL_IR_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "opfuzz/dtype.h"
#include "opfuzz/registry.h"
#include "opfuzz/tensor.h"

namespace opfuzz {

// Basic-block IR of a kernel body. Temporaries are single-assignment value
// ids; named locals live in slots accessed through lload/lstore.
enum class Opcode {
  kConst,
  kGetInput,
  kGetAttr,
  kIndex,   // address of t[i, j, ...]; no bounds check
  kTLoad,   // read through an address; sanitizers trap here
  kTStore,  // write through an address
  kLLoad,
  kLStore,
  kBin,
  kCmp,
  kLogic,
  kRank,
  kDim,
  kSize,
  kDType,
  kLen,
  kResCall,
  kEmit,
  kRequireFail,
  kBr,
  kJmp,
  kHalt,
  kRet,
};

enum class BinOp { kAdd, kSub, kMul, kDiv, kMod };
enum class CmpOp { kEq, kNe, kLt, kLe, kGt, kGe };
enum class LogicOp { kAnd, kOr, kNot };

std::string_view OpcodeName(Opcode op);
std::string_view BinOpSymbol(BinOp op);
std::string_view CmpOpSymbol(CmpOp op);
std::string_view LogicOpSymbol(LogicOp op);

// Static type of an IR value.
enum class VType { kInt, kFloat, kString, kBool, kTensor, kHandle, kAddr, kVoid };

struct Instr {
  Opcode op = Opcode::kConst;
  int result = -1;
  std::vector<int> operands;
  BinOp bin = BinOp::kAdd;
  CmpOp cmp = CmpOp::kEq;
  LogicOp logic = LogicOp::kAnd;
  Scalar imm = int64_t{0};
  // Param name (get_input/get_attr), output name (emit), message
  // (require_fail) or verb (res_call).
  std::string name;
  std::string entity;  // res_call entity kind
  int slot = -1;
  int target_true = -1;   // br then / jmp target
  int target_false = -1;  // br else
  int line = 0;

  bool IsTerminator() const {
    return op == Opcode::kBr || op == Opcode::kJmp || op == Opcode::kHalt ||
           op == Opcode::kRet;
  }
};

struct Block {
  int id = 0;
  std::string label;
  std::vector<Instr> instrs;

  const Instr &terminator() const { return instrs.back(); }
  std::vector<int> Successors() const;
};

struct KernelParam {
  std::string name;
  ParamRole role = ParamRole::kInput;
  std::vector<DType> dtypes;
  Container container = Container::kTensor;
  std::string entity;
};

struct KernelOutput {
  std::string name;
  std::string type;  // as written: "tensor<f32>", "resource<Stack>", "int"
};

// Where the lowering placed each `require`. Used by the graph-mode prepass;
// the extractor rediscovers sinks from the IR alone.
struct RequireSite {
  int block = -1;  // block ending in the check branch
  int fail_block = -1;
  bool top_level = false;  // not nested in any if/for
  std::string message;
};

struct ValueDef {
  int block = -1;
  int instr = -1;
  VType type = VType::kVoid;
};

struct KernelIR {
  std::string kernel_id;
  std::vector<KernelParam> params;
  std::vector<KernelOutput> outputs;
  std::vector<Block> blocks;
  int entry = 0;
  std::vector<std::string> slots;
  std::vector<RequireSite> require_sites;
  std::vector<ValueDef> values;

  const KernelParam *FindParam(std::string_view name) const;
  const Instr &Def(int value) const;
  std::string Dump() const;
};

// Parses one `kernel NAME { ... }` unit and lowers it to IR.
KernelIR ParseKernel(std::string_view source, const std::string &file = "<kernel>");

}  // namespace opfuzz

#endif  // OPFUZZ_KERNEL_IR_H_
