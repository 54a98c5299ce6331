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

#ifndef OPFUZZ_INTERPRETER_H_
#define OPFUZZ_INTERPRETER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opfuzz/kernel_ir.h"
#include "opfuzz/tensor.h"

namespace opfuzz {

enum class CrashKind { kOOB, kNPE, kFPE, kIOF, kUAF };
std::string_view CrashKindName(CrashKind k);
std::optional<CrashKind> CrashKindFromName(std::string_view name);

enum class Verdict { kSuccess, kValidationReject, kCrash };
std::string_view VerdictName(Verdict v);

struct ExecOutcome {
  Verdict verdict = Verdict::kSuccess;
  std::string kernel_id;
  // Reject message or crash description.
  std::string message;
  int block = -1;
  int instr = -1;
  CrashKind kind = CrashKind::kOOB;
  std::map<std::string, ParamValue> outputs;
  std::set<int> covered;
  // The step budget ran out before the kernel returned.
  bool truncated = false;

  bool IsReject() const { return verdict == Verdict::kValidationReject; }
  bool IsCrash() const { return verdict == Verdict::kCrash; }
};

// Resource handles created by res_call New/Create. One table per campaign
// worker; handle ids start at 1 (0 is null).
class HandleTable {
 public:
  struct Entry {
    std::string entity;
    bool open = true;
    std::vector<Scalar> items;
  };

  int64_t Create(const std::string &entity);
  // Marks the handle closed; the entry is kept so later uses are detected.
  void Close(int64_t id);
  const Entry *Find(int64_t id) const;
  Entry *FindMutable(int64_t id);
  std::vector<int64_t> Ids(const std::string &entity, bool open) const;

 private:
  std::map<int64_t, Entry> entries_;
  int64_t next_id_ = 1;
};

struct ExecEnv {
  HandleTable *handles = nullptr;  // null: a fresh private table
  // Provisioned fixture files: path -> byte size.
  std::map<std::string, int64_t> files;
  int64_t max_steps = 200000;
};

// Interprets `kernel` on `binding`. Deterministic in (kernel, binding, mode,
// env contents). Throws Error when a declared parameter is unbound.
ExecOutcome Execute(const KernelIR &kernel, const TestInput &binding, ExecMode mode,
                    ExecEnv &env);
ExecOutcome Execute(const KernelIR &kernel, const TestInput &binding,
                    ExecMode mode = ExecMode::kEager);

// Graph-mode shape inference: evaluates top-level requires whose guards use
// only rank/dim/size, attrs and constants, without running the body.
std::optional<ExecOutcome> ShapeInferPrepass(const KernelIR &kernel, const TestInput &binding);

// Frontend type check shared by both modes: nullopt when every declared
// parameter is bound with an accepted dtype.
std::optional<std::string> CheckBindingTypes(const KernelIR &kernel, const TestInput &binding);

// True when the require's guard only involves shape queries, attrs and
// constants.
bool IsShapeCategoryRequire(const KernelIR &kernel, const RequireSite &site);

}  // namespace opfuzz

#endif  // OPFUZZ_INTERPRETER_H_
