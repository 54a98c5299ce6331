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
#include <random>

#include "doctest.h"
#include "opfuzz/registry.h"
#include "oracles.h"
#include "test_util.h"

using namespace opfuzz;
using opfuzz::testing::ReadFile;
using opfuzz::testing::TestCorpus;

TEST_CASE("descriptor: LoadAndRemapMatrix parses inputs and attrs") {
  auto specs = ParseOpSpecs(R"(op {
  name: "LoadAndRemapMatrix"
  module: "raw_ops"
  input_arg { name: "ckpt_path" type: DT_STRING }
  attr { name: "num_rows" type: "int" }
})");
  REQUIRE(specs.size() == 1);
  const auto &p = specs[0].params;
  REQUIRE(p.size() == 2);
  CHECK(p[0].name == "ckpt_path");
  CHECK(p[0].role == ParamRole::kInput);
  CHECK(p[0].dtype == DType::kDtString);
  CHECK(p[1].name == "num_rows");
  CHECK(p[1].role == ParamRole::kAttr);
  CHECK(p[1].dtype == DType::kInt);
  CHECK(p[1].container == Container::kScalar);
}

TEST_CASE("descriptor: empty text gives no specs") {
  CHECK(ParseOpSpecs("").empty());
  CHECK(ParseOpSpecs("# only a comment\n").empty());
}

TEST_CASE("descriptor: btcbfs.ops matches the hand transcription") {
  auto specs = ParseOpSpecs(ReadFile(std::string(OPFUZZ_CORPUS_DIR) + "/ops/btcbfs.ops"), "btcbfs.ops");
  REQUIRE(specs.size() == 1);
  const OpSpec &s = specs[0];
  CHECK(s.name == "BoostedTreesCalculateBestFeatureSplit");
  CHECK(s.kernel_id == "BTCBFSKernel");
  CHECK(s.module_path == std::vector<std::string>{"raw_ops"});
  CHECK(s.aliases == std::vector<std::vector<std::string>>{{"compat", "v1", "raw_ops"}});
  struct Want {
    const char *name;
    ParamRole role;
    DType dtype;
  };
  const Want want[] = {
      {"node_id_range", ParamRole::kInput, DType::kDtInt64},
      {"stats_summary", ParamRole::kInput, DType::kDtFloat},
      {"l1", ParamRole::kAttr, DType::kFloat},
      {"l2", ParamRole::kAttr, DType::kFloat},
      {"tree_complexity", ParamRole::kAttr, DType::kFloat},
      {"min_node_weight", ParamRole::kAttr, DType::kFloat},
      {"logits_dimension", ParamRole::kAttr, DType::kInt},
      {"split_type", ParamRole::kAttr, DType::kString},
      {"candidate_feature_id", ParamRole::kAttr, DType::kInt},
  };
  REQUIRE(s.params.size() == 9);
  for (size_t i = 0; i < 9; ++i) {
    CAPTURE(i);
    CHECK(s.params[i].name == want[i].name);
    CHECK(s.params[i].role == want[i].role);
    CHECK(s.params[i].dtype == want[i].dtype);
  }
  REQUIRE(s.outputs.size() == 1);
  CHECK(s.outputs[0].name == "gains");
}

TEST_CASE("descriptor: malformed input is rejected with a position") {
  CHECK_THROWS_AS(ParseOpSpecs("op { name: \"X\" input_arg { name: \"a\" type: DT_NOPE } }"), ParseError);
  CHECK_THROWS_AS(ParseOpSpecs("op { name: \"X\" attr { name: \"a\" type: \"int\" } attr { name: \"a\" type: \"int\" } }"),
                  ParseError);
  try {
    ParseOpSpecs("op {\n  name: \"X\"\n  bogus: 1\n}", "f.ops");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
    CHECK(e.file() == "f.ops");
  }
}

TEST_CASE("module tree: alias under compat is not preferred") {
  auto specs = ParseOpSpecs(R"(op { name: "R" module: "raw_ops" alias: "compat.v1.raw_ops" kernel: "K" })");
  ModuleTree t = BuildModuleTree(specs);
  CHECK(t.PathOf("R") == std::vector<std::string>{"raw_ops"});
  CHECK(t.nodes.count("compat.v1.raw_ops") == 1);
  CHECK(t.edges.count({"compat.v1", "compat.v1.raw_ops"}) == 1);
}

TEST_CASE("module tree: single op keeps its declared path") {
  auto specs = ParseOpSpecs(R"(op { name: "Solo" module: "a.b" kernel: "K" })");
  ModuleTree t = BuildModuleTree(specs);
  CHECK(t.placement.size() == 1);
  CHECK(t.PathOf("Solo") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("module tree: equal-length aliases tie-break lexicographically") {
  auto specs = ParseOpSpecs(R"(op { name: "T" module: "zeta.x" alias: "alpha.y" alias: "alpha.x" kernel: "K" })");
  CHECK(BuildModuleTree(specs).PathOf("T") == std::vector<std::string>{"alpha", "x"});
}

TEST_CASE("module tree: corpus placements equal the brute-force minimum") {
  const auto &reg = TestCorpus().registry;
  auto want = oracle::MinimalPlacements(reg.all);
  CHECK(reg.tree.placement.size() == want.size());
  for (const auto &[op, path] : want) {
    CAPTURE(op);
    CHECK(reg.tree.PathOf(op) == path);
  }
}

TEST_CASE("module tree: placement is independent of declaration order") {
  auto specs = TestCorpus().registry.all;
  auto base = BuildModuleTree(specs).placement;
  std::mt19937 rng(7);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(specs.begin(), specs.end(), rng);
    CHECK(BuildModuleTree(specs).placement == base);
  }
}

TEST_CASE("dedup: same signature and kernel collapse") {
  auto specs = ParseOpSpecs(R"(
op { name: "Reshape" module: "raw_ops" kernel: "RK" input_arg { name: "t" type: DT_INT64 } }
op { name: "Reshape" module: "compat.raw_ops" kernel: "RK" input_arg { name: "t" type: DT_INT64 } }
op { name: "Other" module: "raw_ops" kernel: "RK" input_arg { name: "t" type: DT_INT64 } input_arg { name: "u" type: DT_INT64 } }
)");
  auto groups = DedupOperators(specs);
  REQUIRE(groups.size() == 2);
  CHECK(groups[1].representative == "raw_ops.Reshape");
  CHECK(groups[1].members.size() == 2);
}

TEST_CASE("dedup: corpus group count matches the manifest") {
  const auto &c = TestCorpus();
  CHECK(c.registry.groups.size() == c.manifest["golden"]["dedup_groups"].get<size_t>());
  auto it = std::find_if(c.registry.groups.begin(), c.registry.groups.end(),
                         [](const OpGroup &g) { return g.kernel_id == "ReshapeKernel"; });
  REQUIRE(it != c.registry.groups.end());
  CHECK(it->representative == "raw_ops.Reshape");
  CHECK(it->members == std::vector<std::string>{"compat.v1.raw_ops.Reshape", "raw_ops.Reshape"});
}

TEST_CASE("kernel groups: corpus partition matches the manifest") {
  const auto &c = TestCorpus();
  const auto &kg = c.registry.kernel_groups;
  CHECK(kg.size() == c.manifest["golden"]["kernel_group_count"].get<size_t>());
  CHECK(kg.at("ArgKernel") == std::vector<std::string>{"ArgMax", "ArgMin"});
  // Partition: every testable op in exactly one group.
  std::map<std::string, int> seen;
  for (const auto &[k, ops] : kg)
    for (const auto &op : ops) ++seen[op];
  CHECK(seen.size() == c.registry.testable.size());
  for (const auto &[op, n] : seen) CHECK(n == 1);
}

TEST_CASE("kernel groups: dangling kernel binding is an error") {
  auto specs = ParseOpSpecs(R"(op { name: "X" module: "m" kernel: "Missing" })");
  CHECK_THROWS_AS(GroupByKernel(specs, {"Present"}), Error);
}

TEST_CASE("registry: frontend-only and skipped ops are not testable") {
  const auto &reg = TestCorpus().registry;
  auto testable = [&](const std::string &n) {
    return std::any_of(reg.testable.begin(), reg.testable.end(), [&](const OpSpec &s) { return s.name == n; });
  };
  CHECK_FALSE(testable("Shape"));
  CHECK_FALSE(testable("Abort"));
  CHECK(testable("ArgMax"));
  CHECK(reg.testable.size() == 24);
  CHECK(std::is_sorted(reg.testable.begin(), reg.testable.end(),
                       [](const OpSpec &a, const OpSpec &b) { return a.name < b.name; }));
}
