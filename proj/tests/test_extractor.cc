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

#include <algorithm>

#include "doctest.h"
#include "opfuzz/constraint_tree.h"
#include "opfuzz/extractor.h"
#include "oracles.h"
#include "test_util.h"

using namespace opfuzz;
using opfuzz::testing::TestCorpus;

namespace {

const KernelIR &K(const std::string &id) { return TestCorpus().kernels.at(id); }

// Value id of the first instruction satisfying pred.
template <class Pred>
int FindValue(const KernelIR &k, Pred pred) {
  for (const auto &b : k.blocks)
    for (const auto &in : b.instrs)
      if (in.result >= 0 && pred(in)) return in.result;
  return -1;
}

}  // namespace

TEST_CASE("seeds: BTCBFS seeds all nine parameters") {
  auto seeded = SeededParams(SeedSources(K("BTCBFSKernel")));
  CHECK(seeded.size() == TestCorpus().manifest["golden"]["btcbfs_params"].get<size_t>());
  CHECK(seeded.count("logits_dimension") == 1);
  CHECK(seeded.count("node_id_range") == 1);
}

TEST_CASE("seeds: LARM seed count matches the manifest") {
  auto seeded = SeededParams(SeedSources(K("LARMKernel")));
  CHECK(seeded.size() == TestCorpus().manifest["golden"]["larm_seeds"].get<size_t>());
}

TEST_CASE("seeds: kernel without params has no taint") {
  KernelIR k = ParseKernel("kernel K { x = 1 + 2; }");
  CHECK(SeededParams(SeedSources(k)).empty());
  TaintState t = PropagateTaint(k, SeedSources(k));
  for (const auto &v : t.values) CHECK(v.empty());
}

TEST_CASE("propagation: size comparison carries both parameters") {
  KernelIR k = ParseKernel(R"(kernel K {
  input row_remapping : tensor<i64>;
  attr num_rows : int;
  n = size(row_remapping);
  c = n == num_rows;
  require c, "mismatch";
})");
  TaintState t = PropagateTaint(k, SeedSources(k));
  int cmp = FindValue(k, [](const Instr &in) { return in.op == Opcode::kCmp; });
  REQUIRE(cmp >= 0);
  CHECK(t.values[static_cast<size_t>(cmp)] == TaintSet{"num_rows", "row_remapping"});
  int konst = FindValue(k, [](const Instr &in) { return in.op == Opcode::kConst; });
  if (konst >= 0) CHECK(t.values[static_cast<size_t>(konst)].empty());
}

TEST_CASE("propagation: corpus taint equals the def-use closure oracle") {
  for (const auto &[id, k] : TestCorpus().kernels) {
    CAPTURE(id);
    TaintState t = PropagateTaint(k, SeedSources(k));
    CHECK(t.values == oracle::TaintByReachability(k));
  }
}

TEST_CASE("property: the fixpoint is stable under one more pass") {
  for (const auto &[id, k] : TestCorpus().kernels) {
    TaintState t = PropagateTaint(k, SeedSources(k));
    TaintState again = t;
    CAPTURE(id);
    CHECK_FALSE(PropagateOnce(k, again));
    CHECK(again == t);
  }
}

TEST_CASE("sinks: lowered require is a sink passing on true") {
  KernelIR k = ParseKernel(R"(kernel K {
  input s : tensor<f32>;
  output out : tensor<f32>;
  require rank(s) == 4, "rank";
  if 1 == 1 { emit out = s; }
})");
  auto sinks = FindSinks(k, PropagateTaint(k, SeedSources(k)));
  REQUIRE(sinks.size() == 1);
  CHECK(sinks[0].pass_on_true);
  CHECK(sinks[0].block == k.entry);
}

TEST_CASE("sinks: BTCBFS sink count matches the manifest") {
  const KernelIR &k = K("BTCBFSKernel");
  CHECK(FindSinks(k, PropagateTaint(k, SeedSources(k))).size() ==
        TestCorpus().manifest["golden"]["btcbfs_sinks"].get<size_t>());
}

TEST_CASE("dominators: agree with the removal definition") {
  for (const auto &[id, k] : TestCorpus().kernels) {
    auto idom = Dominators(k);
    auto reach = oracle::Reachable(k);
    CAPTURE(id);
    for (int a : reach)
      for (int b : reach) CHECK(Dominates(idom, a, b) == oracle::DominatesByRemoval(k, a, b));
  }
}

TEST_CASE("extract: BTCBFS logical node guards the hessian check") {
  ExtractResult r = ExtractConstraints(K("BTCBFSKernel"));
  const Branch *ld = nullptr;
  for (const auto &b : r.tree.root.branches)
    if (Print(b.cond) == "logits_dimension > 1") ld = &b;
  REQUIRE(ld != nullptr);
  REQUIRE(ld->body.constraints.size() == 1);
  CHECK(ld->body.constraints[0].Print() == "(dim(stats_summary, 3) % logits_dimension) == 0");
}

TEST_CASE("extract: no requires gives an empty root") {
  CHECK(ExtractConstraints(K("IdentityKernel")).tree.root.empty());
}

TEST_CASE("extract: a sink-only loop becomes a forall") {
  KernelIR k = ParseKernel(R"(kernel K {
  input v : tensor<i64>;
  for i in 0 .. size(v) { require v[i] >= 0, "neg"; }
})");
  ExtractResult r = ExtractConstraints(k);
  REQUIRE(r.tree.root.constraints.size() == 1);
  CHECK(r.tree.root.constraints[0].Print() == "forall i in [0, size(v)): val(v, i) >= 0");
}

TEST_CASE("extract: a mixed loop body is omitted and recorded") {
  KernelIR k = ParseKernel(R"(kernel K {
  input v : tensor<i64>;
  output out : int;
  s = 0;
  for i in 0 .. size(v) { require v[i] >= 0, "neg"; s = s + v[i]; }
  emit out = s;
})");
  ExtractResult r = ExtractConstraints(k);
  CHECK(r.tree.root.constraints.empty());
  CHECK(r.tree.omissions.size() == 1);
}

TEST_CASE("lift: LARM carries the four checkpoint constraints") {
  const auto &c = TestCorpus();
  const OpSpec *spec = c.registry.Find("LoadAndRemapMatrix");
  REQUIRE(spec);
  ConstraintTree t = LiftToSpec(ExtractConstraints(K("LARMKernel")).tree, *spec);
  std::vector<std::string> printed;
  for (const auto &con : t.root.constraints) printed.push_back(con.Print());
  for (const char *want : {"0 == ndim(old_tensor_name)", "1 == ndim(row_remapping)",
                           "num_rows == size(row_remapping)", "num_cols == size(col_remapping)"}) {
    CAPTURE(want);
    CHECK(std::find(printed.begin(), printed.end(), want) != printed.end());
  }
  CHECK(CanonicalText(t.root) == CanonicalText(c.golden.at("LoadAndRemapMatrix")));
}

TEST_CASE("lift: tautologies fold away") {
  KernelIR k = ParseKernel(R"(kernel K {
  input x : tensor<i64>;
  require 1 == 1, "always";
  require rank(x) == 1, "vector";
})");
  ExtractResult r = ExtractConstraints(k);
  REQUIRE(r.tree.root.constraints.size() == 1);
  CHECK(r.tree.root.constraints[0].Print() == "1 == ndim(x)");
}

TEST_CASE("lift: unknown parameter names degrade to unliftable") {
  KernelIR k = ParseKernel(R"(kernel K {
  input x : tensor<i64>;
  require rank(x) == 1, "vector";
})");
  OpSpec spec = ParseOpSpecs(R"(op { name: "K" module: "m" kernel: "K" input_arg { name: "y" type: DT_INT64 } })")[0];
  ConstraintTree t = LiftToSpec(ExtractConstraints(k).tree, spec);
  REQUIRE(t.root.constraints.size() == 1);
  CHECK(t.root.constraints[0].unliftable);
}

TEST_CASE("golden: every corpus operator matches its golden tree") {
  const auto &c = TestCorpus();
  CHECK(c.golden.size() >= 20);
  for (const auto &spec : c.registry.testable) {
    CAPTURE(spec.name);
    ConstraintTree t = LiftToSpec(ExtractConstraints(c.KernelOf(spec)).tree, spec);
    REQUIRE(c.golden.count(spec.name) == 1);
    CHECK(CanonicalText(t.root) == CanonicalText(c.golden.at(spec.name)));
  }
}

TEST_CASE("property: extraction is deterministic and round-trips") {
  for (const auto &[id, k] : TestCorpus().kernels) {
    std::string a = Serialize(ExtractConstraints(k).tree.root);
    std::string b = Serialize(ExtractConstraints(k).tree.root);
    CAPTURE(id);
    CHECK(a == b);
    CHECK(Serialize(ParseTree(a, id)) == a);
  }
}

TEST_CASE("property: lifting soundness on a sample of the small domain") {
  // The acceptance binary runs the full budget; this is a fast smoke pass.
  for (const auto &[id, k] : TestCorpus().kernels) {
    auto r = oracle::CheckLiftingSoundness(k, 4000, 42);
    CAPTURE(id);
    for (const auto &e : r.counterexamples) CAPTURE(e);
    CHECK(r.failures == 0);
  }
}
