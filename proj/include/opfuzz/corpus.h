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

#ifndef OPFUZZ_CORPUS_H_
#define OPFUZZ_CORPUS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "opfuzz/constraint_tree.h"
#include "opfuzz/interpreter.h"
#include "opfuzz/kernel_ir.h"
#include "opfuzz/registry.h"

namespace opfuzz {

// Corpus-level inconsistency: dangling references, missing files.
class CorpusError : public Error {
 public:
  using Error::Error;
};

struct Fixture {
  std::string name;
  int64_t bytes = 0;
  uint8_t fill = 0;
};

struct TestScript {
  std::string op;
  std::vector<Fixture> fixtures;
  std::vector<std::vector<std::string>> sequences;
  std::string file;
  int line = 0;
};

// Parses `test "Op" { fixture file "name" bytes N fill B; seq A B C; }`
// blocks. Throws ParseError on malformed input or duplicate fixture names.
std::vector<TestScript> ParseTestScripts(std::string_view text, const std::string &file);

struct BugEntry {
  std::string id;
  std::string op;
  std::string kernel_id;
  int block = -1;
  CrashKind kind = CrashKind::kOOB;
  std::string label;
  TestInput witness;
  // Resource params of the witness: "open", "closed" or "null".
  std::map<std::string, std::string> handle_states;
};

struct Corpus {
  std::string dir;
  std::vector<OpSpec> specs;
  Registry registry;
  std::map<std::string, KernelIR> kernels;
  std::map<std::string, std::string> kernel_files;
  std::map<std::string, TestScript> scripts;  // by operator name
  std::map<std::string, TreeNode> golden;     // by operator name
  std::vector<BugEntry> bugs;
  nlohmann::json manifest;

  const KernelIR &KernelOf(const OpSpec &spec) const;
  const TestScript *ScriptOf(const std::string &op) const;
};

// Loads and cross-validates a corpus directory. Throws CorpusError (or
// ParseError) with a file location on any inconsistency.
Corpus LoadCorpus(const std::string &dir);

// Materializes every fixture of `script` under `workdir`; returns
// fixture name -> path.
std::map<std::string, std::string> ProvisionFixtures(const TestScript &script,
                                                     const std::string &workdir);

// Replays a manifest witness: sets up the handle table, then executes.
ExecOutcome ReplayWitness(const Corpus &corpus, const BugEntry &bug, ExecMode mode = ExecMode::kEager);

}  // namespace opfuzz

#endif  // OPFUZZ_CORPUS_H_
