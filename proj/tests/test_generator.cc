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
#include "opfuzz/campaign.h"
#include "opfuzz/constraint_eval.h"
#include "opfuzz/entity.h"
#include "opfuzz/generator.h"
#include "test_util.h"

using namespace opfuzz;
using opfuzz::testing::TestCorpus;

namespace {

const CampaignSetup &Setup() {
  static const CampaignSetup s = PrepareCampaign(TestCorpus(), {ExecMode::kEager, ExecMode::kGraph});
  return s;
}

const std::vector<DataTemplate> &Templates(const std::string &op) { return Setup().templates.at(op); }

const OpSpec &Spec(const std::string &op) { return *TestCorpus().registry.Find(op); }

const TensorVal &Tensor(const TestInput &in, const std::string &p) { return std::get<TensorVal>(*in.Find(p)); }

std::vector<int64_t> IntsOf(const TensorVal &t) {
  std::vector<int64_t> out;
  for (int64_t i = 0; i < *t.size(); ++i) out.push_back(std::get<int64_t>(t.At(i)));
  return out;
}

}  // namespace

TEST_CASE("entities: stack operators share the Stack entity") {
  auto groups = ClusterEntities({"Stack", "StackClose", "StackPush", "StackPop"});
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].entity == "Stack");
  CHECK(groups[0].verbs.at("StackClose") == "Close");
  CHECK(groups[0].verbs.at("StackPush") == "Push");
  CHECK(groups[0].verbs.at("StackPop") == "Pop");
  CHECK(SplitCamel("StackClose") == std::vector<std::string>{"Stack", "Close"});
  CHECK(SplitCamel("BTCBFSKernel") == std::vector<std::string>{"BTCBFS", "Kernel"});
}

TEST_CASE("entities: a lone noun forms a singleton without sequences") {
  auto groups = ClusterEntities({"Identity"});
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].entity == "Identity");
  CHECK(groups[0].sequences.empty());
}

TEST_CASE("entities: corpus grouping matches the manifest") {
  const auto &want = TestCorpus().manifest["golden"]["entity_groups"];
  const auto &groups = Setup().groups;
  CHECK(groups.size() == TestCorpus().manifest["golden"]["entity_group_count"].get<size_t>());
  for (const auto &[entity, members] : want.items()) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const EntityGroup &g) { return g.entity == entity; });
    REQUIRE(it != groups.end());
    std::vector<std::string> got;
    for (const auto &[op, verb] : it->verbs) got.push_back(op);
    CHECK(got == members.get<std::vector<std::string>>());
  }
}

TEST_CASE("control: LARM needs the checkpoint fixture") {
  const ControlTemplate &c = Setup().controls.at("LoadAndRemapMatrix");
  CHECK(c.file_fixtures.at("ckpt_path") == "bundle_checkpoint");
  CHECK(c.modes.size() == 2);
  CHECK_FALSE(c.unfillable);
}

TEST_CASE("control: a plain op has modes only") {
  const ControlTemplate &c = Setup().controls.at("Identity");
  CHECK(c.file_fixtures.empty());
  CHECK(c.producers.empty());
  CHECK(c.sequence.empty());
}

TEST_CASE("control: StackPop runs after StackNew and StackPush") {
  const ControlTemplate &c = Setup().controls.at("StackPop");
  const TestScript *script = TestCorpus().ScriptOf("StackPop");
  REQUIRE(script);
  REQUIRE(script->sequences.size() == 1);
  CHECK(c.sequence == script->sequences[0]);
  auto pos = [&](const std::string &op) {
    return std::find(c.sequence.begin(), c.sequence.end(), op) - c.sequence.begin();
  };
  CHECK(c.position == pos("StackPop"));
  CHECK(pos("StackNew") < c.position);
  CHECK(pos("StackPush") < c.position);
  CHECK(c.producers.at("handle") == "StackNew");
}

TEST_CASE("data template: LARM remapping slots are sized by attrs") {
  const DataTemplate &t = Templates("LoadAndRemapMatrix").at(0);
  CHECK(t.FindSlot("col_remapping")->Print() == "col_remapping = [DI] * num_cols");
  CHECK(t.FindSlot("row_remapping")->Print() == "row_remapping = [DI] * num_rows");
  CHECK(t.OrderOf("num_cols") < t.OrderOf("col_remapping"));
}

TEST_CASE("data template: an unconstrained int attr is a bare DI") {
  OpSpec spec = ParseOpSpecs(R"(op { name: "U" module: "m" kernel: "K" attr { name: "n" type: "int" } })")[0];
  auto ts = BuildDataTemplates(spec, TreeNode{});
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].FindSlot("n")->Print() == "n = DI");
  CHECK(ts[0].FindSlot("n")->facts.empty());
}

TEST_CASE("data template: BTCBFS hessian dim is a multiple of logits_dimension") {
  bool found = false;
  for (const auto &t : Templates("BoostedTreesCalculateBestFeatureSplit")) {
    bool guarded = std::any_of(t.guards.begin(), t.guards.end(),
                               [](const ExprPtr &g) { return Print(g) == "logits_dimension > 1"; });
    if (!guarded) continue;
    found = true;
    CHECK(t.FindSlot("stats_summary")->Print().find("dim[3] multiple of logits_dimension") != std::string::npos);
  }
  CHECK(found);
}

TEST_CASE("data template: contradictory path facts reject the template") {
  OpSpec spec = ParseOpSpecs(R"(op { name: "U" module: "m" kernel: "K" attr { name: "n" type: "int" } })")[0];
  TreeNode tree;
  Constraint a, b;
  a.pred = ParseConstraintExpr("n == 1");
  b.pred = ParseConstraintExpr("n == 2");
  tree.AddConstraint(a);
  tree.AddConstraint(b);
  auto ts = BuildDataTemplates(spec, tree);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].rejected);
}

TEST_CASE("generate: LARM with a huge num_cols uses a lazy fill") {
  const DataTemplate &t = Templates("LoadAndRemapMatrix").at(0);
  const ControlTemplate &c = Setup().controls.at("LoadAndRemapMatrix");
  std::map<std::string, ParamValue> pinned{{"num_cols", Scalar(int64_t{1073741824})}};
  bool big_fill = false;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    TestInput in = GenerateInput(t, c, seed, pinned);
    const TensorVal &col = Tensor(in, "col_remapping");
    CHECK(col.lazy());
    CHECK(col.shape() == std::vector<int64_t>{1073741824});
    if (col.uniform() && col.fill() == Scalar(int64_t{2147483649})) big_fill = true;
  }
  CHECK(big_fill);
}

TEST_CASE("generate: fully pinned template gives one input for every seed") {
  OpSpec spec = ParseOpSpecs(R"(op { name: "U" module: "m" kernel: "K"
    attr { name: "a" type: "int" } attr { name: "b" type: "int" } })")[0];
  TreeNode tree;
  Constraint a, b;
  a.pred = ParseConstraintExpr("a == 3");
  b.pred = ParseConstraintExpr("b == a + 2");
  tree.AddConstraint(a);
  tree.AddConstraint(b);
  auto ts = BuildDataTemplates(spec, tree);
  ControlTemplate ctrl;
  TestInput first = GenerateInput(ts.at(0), ctrl, 1);
  CHECK(std::get<Scalar>(*first.Find("a")) == Scalar(int64_t{3}));
  CHECK(std::get<Scalar>(*first.Find("b")) == Scalar(int64_t{5}));
  for (uint64_t seed = 2; seed < 50; ++seed) CHECK(GenerateInput(ts.at(0), ctrl, seed) == first);
}

TEST_CASE("generate: BTCBFS guided reject rate is under the frozen threshold") {
  CampaignConfig cfg;
  cfg.corpus = OPFUZZ_CORPUS_DIR;
  cfg.ops = {"BoostedTreesCalculateBestFeatureSplit"};
  cfg.strategy = Strategy::kBoth;
  CampaignReport r = RunCampaign(cfg, TestCorpus());
  double threshold = TestCorpus().manifest["thresholds"]["btcbfs_guided_reject_rate"].get<double>();
  const OpReport *guided = nullptr, *random = nullptr;
  for (const auto &o : r.operators) (o.strategy == "guided" ? guided : random) = &o;
  REQUIRE(guided);
  REQUIRE(random);
  REQUIRE(guided->executions == 10000);
  double reject_rate = static_cast<double>(guided->rejects) / static_cast<double>(guided->executions);
  MESSAGE("btcbfs guided reject rate " << reject_rate);
  CHECK(reject_rate < threshold);
  CHECK(random->valid_rate() < guided->valid_rate());
}

TEST_CASE("repair: LARM row_remapping is truncated to num_rows") {
  const DataTemplate &t = Templates("LoadAndRemapMatrix").at(0);
  const ControlTemplate &c = Setup().controls.at("LoadAndRemapMatrix");
  TestInput in = GenerateInput(t, c, 5, {{"num_rows", Scalar(int64_t{1})}});
  REQUIRE(std::all_of(t.constraints.begin(), t.constraints.end(), [&](const Constraint &k) { return Evaluate(k, in); }));
  in.values["row_remapping"] = TensorVal::Dense(DType::kDtInt64, {2}, {int64_t{1}, int64_t{2}});
  RepairResult r = RepairInput(in, t);
  CHECK(r.fixpoint);
  CHECK(r.passes <= 8);
  CHECK(IntsOf(Tensor(r.input, "row_remapping")) == std::vector<int64_t>{1});
  CHECK(std::get<Scalar>(*r.input.Find("num_rows")) == Scalar(int64_t{1}));
}

TEST_CASE("repair: identity on valid inputs") {
  for (const auto &spec : TestCorpus().registry.testable) {
    const auto &ts = Templates(spec.name);
    const ControlTemplate &c = Setup().controls.at(spec.name);
    for (const auto &t : ts) {
      if (t.rejected) continue;
      for (uint64_t seed = 0; seed < 20; ++seed) {
        TestInput in = GenerateInput(t, c, seed);
        if (in.provenance != Provenance::kGuided) continue;
        RepairResult r = RepairInput(in, t);
        CAPTURE(spec.name);
        CHECK(r.fixpoint);
        CHECK(r.input == in);
      }
    }
  }
}

TEST_CASE("repair: random violations under seed 7 mostly reach a fixpoint") {
  int64_t attempts = 0, fixed = 0;
  for (const auto &spec : TestCorpus().registry.testable) {
    const auto &ts = Templates(spec.name);
    for (uint64_t i = 0; i < 200; ++i) {
      const DataTemplate &t = ts[i % ts.size()];
      if (t.rejected) continue;
      TestInput in = GenerateRandom(spec, MixSeed(7, Fnv1a(spec.name), i));
      bool ok = std::all_of(t.constraints.begin(), t.constraints.end(), [&](const Constraint &k) { return Evaluate(k, in); });
      if (ok) continue;
      RepairResult r = RepairInput(in, t);
      ++attempts;
      fixed += r.fixpoint;
      // Repair soundness: dtypes never change.
      for (const auto &[name, v] : in.values) {
        const auto *before = std::get_if<TensorVal>(&v);
        const auto *after = std::get_if<TensorVal>(r.input.Find(name));
        if (before && after) CHECK(before->dtype() == after->dtype());
      }
    }
  }
  double rate = static_cast<double>(fixed) / static_cast<double>(attempts);
  MESSAGE("repair fixpoint rate " << rate << " over " << attempts << " violating inputs");
  CHECK(rate >= TestCorpus().manifest["thresholds"]["repair_fixpoint_rate"].get<double>());
}

TEST_CASE("random: deterministic per seed and within the documented ranges") {
  for (const auto &spec : TestCorpus().registry.testable) {
    for (uint64_t i = 0; i < 100; ++i) {
      TestInput a = GenerateRandom(spec, i), b = GenerateRandom(spec, i);
      CHECK(a == b);
      for (const auto &p : spec.params) {
        const auto *t = std::get_if<TensorVal>(a.Find(p.name));
        if (!t) continue;
        CHECK(t->rank() <= 4);
        for (int64_t e : t->shape()) CHECK((e >= 0 && e <= 8));
        CHECK(std::find(p.dtypes.begin(), p.dtypes.end(), t->dtype()) != p.dtypes.end());
      }
    }
  }
}

TEST_CASE("property: inputs satisfying their path are never rejected") {
  const auto &c = TestCorpus();
  int64_t checked = 0;
  for (const auto &spec : c.registry.testable) {
    const auto &ts = Templates(spec.name);
    const ControlTemplate &ctrl = Setup().controls.at(spec.name);
    if (ctrl.unfillable || !spec.kernel_id.size()) continue;
    bool needs_env = !ctrl.file_fixtures.empty() || !ctrl.producers.empty();
    if (needs_env) continue;  // covered end to end by the campaign tests
    std::vector<TreePath> paths = EnumeratePaths(Setup().trees.at(spec.name).root);
    for (uint64_t i = 0; i < 1000; ++i) {
      size_t k = i % ts.size();
      if (ts[k].rejected) continue;
      TestInput in = GenerateInput(ts[k], ctrl, MixSeed(42, Fnv1a(spec.name), i));
      if (!EvaluatePath(paths[k], in)) continue;
      ++checked;
      for (ExecMode m : {ExecMode::kEager, ExecMode::kGraph}) {
        ExecOutcome out = Execute(c.KernelOf(spec), in, m);
        CAPTURE(spec.name);
        CAPTURE(out.message);
        CHECK_FALSE(out.IsReject());
      }
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("property: every logical node is exercised on both sides") {
  for (const auto &spec : TestCorpus().registry.testable) {
    const auto &ts = Templates(spec.name);
    std::set<std::string> guards;
    for (const auto &t : ts)
      if (!t.rejected)
        for (const auto &g : t.guards) guards.insert(Print(g));
    std::function<void(const TreeNode &)> walk = [&](const TreeNode &n) {
      for (const auto &b : n.branches) {
        std::string cond = Print(b.cond);
        CAPTURE(spec.name);
        CAPTURE(cond);
        bool taken = guards.count(cond);
        bool skipped = std::any_of(ts.begin(), ts.end(), [&](const DataTemplate &t) {
          return !t.rejected && std::none_of(t.guards.begin(), t.guards.end(),
                                             [&](const ExprPtr &g) { return Print(g) == cond; });
        });
        CHECK(taken);
        CHECK(skipped);
        walk(b.body);
      }
    };
    walk(Setup().trees.at(spec.name).root);
  }
}
