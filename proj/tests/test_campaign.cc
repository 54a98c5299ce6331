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


#include <filesystem>
#include <set>

#include "doctest.h"
#include "opfuzz/campaign.h"
#include "opfuzz/causality.h"
#include "opfuzz/report.h"
#include "test_util.h"

using namespace opfuzz;
using opfuzz::testing::ReadFile;
using opfuzz::testing::TestCorpus;
namespace fs = std::filesystem;

namespace {

const CampaignSetup &Setup() {
  static const CampaignSetup s = PrepareCampaign(TestCorpus(), {ExecMode::kEager, ExecMode::kGraph});
  return s;
}

fs::path TempDir(const std::string &name) {
  fs::path p = fs::temp_directory_path() / ("opfuzz_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CampaignConfig SmallConfig(Strategy s, int64_t iterations) {
  CampaignConfig cfg;
  cfg.corpus = OPFUZZ_CORPUS_DIR;
  cfg.strategy = s;
  cfg.iterations = iterations;
  return cfg;
}

std::string Label(const BugEntry &b) {
  const auto &c = TestCorpus();
  return ClassifyCausality(b.witness, *c.registry.Find(b.op), Setup().roles.at(b.kernel_id));
}

}  // namespace

TEST_CASE("corpus: census matches the manifest") {
  const auto &c = TestCorpus();
  const auto &census = c.manifest["census"];
  CHECK(c.registry.testable.size() >= 20);
  CHECK(c.registry.testable.size() == census["operators"].get<size_t>());
  CHECK(c.kernels.size() == census["kernels"].get<size_t>());
  CHECK(c.specs.size() == census["descriptors"].get<size_t>());
  CHECK(c.bugs.size() == census["bugs"].get<size_t>());
  std::map<std::string, int64_t> kinds;
  for (const auto &b : c.bugs) ++kinds[std::string(CrashKindName(b.kind))];
  CHECK(kinds.size() == 5);
  for (const auto &[k, n] : census["bugs_by_kind"].items()) CHECK(kinds[k] == n.get<int64_t>());
  for (const char *op : {"BoostedTreesCalculateBestFeatureSplit", "LoadAndRemapMatrix", "ArgMax", "ArgMin",
                         "StackNew", "StackPush", "StackPop", "StackClose"})
    CHECK(c.registry.Find(op) != nullptr);
}

TEST_CASE("corpus: empty directory is rejected") {
  fs::path dir = TempDir("empty");
  try {
    LoadCorpus(dir.string());
    FAIL("expected a corpus error");
  } catch (const CorpusError &e) {
    CHECK(std::string(e.what()).find("no descriptors found") != std::string::npos);
  }
}

TEST_CASE("corpus: dangling kernel reference is fatal") {
  fs::path dir = TempDir("dangling");
  fs::create_directories(dir / "ops");
  std::ofstream(dir / "ops" / "x.ops") << "op { name: \"X\" module: \"m\" kernel: \"NoSuchKernel\" }\n";
  try {
    LoadCorpus(dir.string());
    FAIL("expected a corpus error");
  } catch (const CorpusError &e) {
    CHECK(std::string(e.what()).find("x.ops:1") != std::string::npos);
  }
}

TEST_CASE("test scripts: fixtures and sequences parse") {
  auto scripts = ParseTestScripts(R"(test "LARM" {
  fixture file "bundle_checkpoint" bytes 1024 fill 0x00;
  seq StackNew StackPush StackPop StackClose;
})", "x.test");
  REQUIRE(scripts.size() == 1);
  CHECK(scripts[0].op == "LARM");
  REQUIRE(scripts[0].fixtures.size() == 1);
  CHECK(scripts[0].fixtures[0].bytes == 1024);
  CHECK(scripts[0].sequences.at(0).size() == 4);
  CHECK_THROWS_AS(ParseTestScripts("test \"A\" { fixture file \"f\" bytes 1; fixture file \"f\" bytes 2; }", "y.test"),
                  ParseError);
}

TEST_CASE("fixtures: provisioned with exact size and fill, reproducibly") {
  TestScript s;
  s.op = "LARM";
  s.fixtures.push_back({"bundle_checkpoint", 1024, 0x5a});
  fs::path dir = TempDir("fixtures");
  auto paths = ProvisionFixtures(s, dir.string());
  REQUIRE(paths.count("bundle_checkpoint") == 1);
  std::string first = ReadFile(paths.at("bundle_checkpoint"));
  CHECK(first.size() == 1024);
  CHECK(first == std::string(1024, '\x5a'));
  auto again = ProvisionFixtures(s, dir.string());
  CHECK(ReadFile(again.at("bundle_checkpoint")) == first);
  CHECK(ProvisionFixtures(TestScript{}, dir.string()).empty());
}

TEST_CASE("causality: manifest labels cover the five data causes") {
  std::set<std::string> labels;
  for (const auto &b : TestCorpus().bugs) labels.insert(b.label);
  for (const char *l : {"SHAPE_ZERO_DIM", "SHAPE_BIG_INDEX", "VALUE_ZERO", "VALUE_BIG_INT", "VALUE_NEGATIVE"})
    CHECK(labels.count(l) == 1);
}

TEST_CASE("causality: witnesses classify to their manifest labels") {
  for (const auto &b : TestCorpus().bugs) {
    CAPTURE(b.id);
    CHECK(Label(b) == b.label);
  }
}

TEST_CASE("causality: rule order decides between competing causes") {
  OpSpec spec = ParseOpSpecs(R"(op { name: "P" module: "m" kernel: "K"
    input_arg { name: "x" type: DT_INT64 } attr { name: "d" type: "int" } })")[0];
  ParamRoles roles;
  roles.index = {"x"};
  roles.size_like = {"x"};
  roles.divisor = {"d"};
  auto in = [](std::vector<int64_t> shape, std::vector<int64_t> v, int64_t d) {
    TestInput t;
    std::vector<Scalar> data(v.begin(), v.end());
    t.values["x"] = TensorVal::Dense(DType::kDtInt64, std::move(shape), std::move(data));
    t.values["d"] = Scalar(d);
    return t;
  };
  CHECK(ClassifyCausality(in({0}, {}, 0), spec, roles) == "SHAPE_ZERO_DIM");
  CHECK(ClassifyCausality(in({}, {5}, 1), spec, roles) == "SHAPE_ZERO_DIM");
  CHECK(ClassifyCausality(in({1}, {int64_t{1} << 20}, 0), spec, roles) == "SHAPE_BIG_INDEX");
  CHECK(ClassifyCausality(in({1}, {3}, 0), spec, roles) == "VALUE_ZERO");
  CHECK(ClassifyCausality(in({1}, {3}, int64_t{1} << 40), spec, roles) == "VALUE_BIG_INT");
  CHECK(ClassifyCausality(in({1}, {-3}, 1), spec, roles) == "VALUE_NEGATIVE");
  TestInput mismatch = in({1}, {3}, 1);
  mismatch.values["x"] = TensorVal::Dense(DType::kDtFloat, {1}, {1.0});
  CHECK(ClassifyCausality(mismatch, spec, roles) == "TYPE_MISMATCH");
  CHECK(ClassifyCausality(in({1}, {3}, 1), spec, roles) == "OTHER");
}

TEST_CASE("config: parse, defaults and errors") {
  CampaignConfig c = ParseConfig("seed = 7\niterations = 50 # inline\nmodes = graph\nstrategy = both\nops = Identity, Fill\n");
  CHECK(c.seed == 7);
  CHECK(c.iterations == 50);
  CHECK(c.modes == std::vector<ExecMode>{ExecMode::kGraph});
  CHECK(c.strategy == Strategy::kBoth);
  CHECK(c.ops == std::vector<std::string>{"Identity", "Fill"});
  CHECK(ParseConfig("").iterations == 10000);
  CHECK_THROWS_AS(ParseConfig("colour = blue\n"), ParseError);
  CHECK_THROWS_AS(ParseConfig("iterations = 0\n"), ParseError);
  CHECK_THROWS_AS(ParseConfig("strategy = clever\n"), ParseError);
}

TEST_CASE("campaign: one iteration on Identity") {
  CampaignConfig cfg = SmallConfig(Strategy::kGuided, 1);
  cfg.ops = {"Identity"};
  CampaignReport r = RunCampaign(cfg, TestCorpus());
  REQUIRE(r.operators.size() == 1);
  CHECK(r.operators[0].executions == 1);
  CHECK(r.operators[0].valid_rate() == 1.0);
}

TEST_CASE("campaign: report schema and invariants") {
  CampaignConfig cfg = SmallConfig(Strategy::kBoth, 400);
  CampaignReport r = RunCampaign(cfg, TestCorpus());
  nlohmann::json j = ReportToJson(r);
  std::set<std::string> keys;
  for (const auto &[k, v] : j.items()) keys.insert(k);
  CHECK(keys == std::set<std::string>{"config", "operators", "timeline", "constraint_stats", "findings"});
  CHECK(j["operators"].is_array());
  for (const char *k : {"by_category", "single_param", "param_pairs"}) CHECK(j["constraint_stats"].contains(k));

  for (const auto &o : r.operators) {
    CHECK(o.successful <= o.executions);
    CHECK(o.executions == 400);
    for (size_t i = 1; i < o.timeline.size(); ++i) CHECK(o.timeline[i - 1].second <= o.timeline[i].second);
  }
  std::set<std::tuple<std::string, CrashKind, std::string, int>> keys_seen;
  const auto &labels = CausalityLabels();
  for (const auto &f : r.findings) {
    CHECK(keys_seen.insert({f.strategy, f.kind, f.kernel_id, f.block}).second);
    CHECK(std::find(labels.begin(), labels.end(), f.label) != labels.end());
  }
}

TEST_CASE("campaign: constraint stats equal the hand-tallied manifest") {
  CampaignConfig cfg = SmallConfig(Strategy::kGuided, 1);
  CampaignReport r = RunCampaign(cfg, TestCorpus());
  const auto &want = TestCorpus().manifest["golden_stats"]["by_category"];
  for (const auto &[k, v] : want.items()) {
    CAPTURE(k);
    CHECK(r.stats.by_category.at(k) == v.get<int64_t>());
  }
  for (const auto &[k, v] : r.stats.single_param) {
    CAPTURE(k);
    CHECK(v > 0);
  }
}

TEST_CASE("campaign: reports are byte-identical across runs") {
  CampaignConfig cfg = SmallConfig(Strategy::kBoth, 300);
  fs::path dir = TempDir("determinism");
  WriteReport(RunCampaign(cfg, TestCorpus()), (dir / "a.json").string());
  WriteReport(RunCampaign(cfg, TestCorpus()), (dir / "b.json").string());
  std::string a = ReadFile((dir / "a.json").string());
  CHECK(!a.empty());
  CHECK(a == ReadFile((dir / "b.json").string()));
  cfg.seed = 43;
  WriteReport(RunCampaign(cfg, TestCorpus()), (dir / "c.json").string());
  CHECK(a != ReadFile((dir / "c.json").string()));
}

TEST_CASE("compare: swapping the arms is flagged") {
  CampaignConfig cfg = SmallConfig(Strategy::kBoth, 2000);
  cfg.ops = {"BoostedTreesCalculateBestFeatureSplit", "LoadAndRemapMatrix"};
  nlohmann::json both = ReportToJson(RunCampaign(cfg, TestCorpus()));
  CHECK(CompareReports(both, both).empty());
  nlohmann::json swapped = both;
  for (auto &o : swapped["operators"])
    o["strategy"] = o["strategy"] == "guided" ? "random" : "guided";
  CHECK_FALSE(CompareReports(swapped, swapped).empty());
}

TEST_CASE("compare: kernel-group reuse is counted") {
  CampaignConfig cfg = SmallConfig(Strategy::kGuided, 200);
  cfg.ops = {"ArgMax", "ArgMin"};
  CampaignReport r = RunCampaign(cfg, TestCorpus());
  int64_t reuse = 0;
  for (const auto &o : r.operators) reuse += o.reuse;
  CHECK(reuse >= 1);
}
