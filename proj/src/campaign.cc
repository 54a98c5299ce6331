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

#include "opfuzz/campaign.h"

#include <algorithm>
#include <chrono>
#include <deque>

#include "opfuzz/causality.h"
#include "opfuzz/generator.h"

namespace opfuzz {

namespace {

constexpr size_t kReuseCap = 16;
constexpr int64_t kProbePeriod = 8;
constexpr int64_t kSeedGuided = 1;
constexpr int64_t kSeedRandom = 2;

void CollectSequences(const Corpus &corpus, std::vector<std::vector<std::string>> &out) {
  for (const auto &[_, script] : corpus.scripts)
    for (const auto &seq : script.sequences) out.push_back(seq);
}

void CountLogical(const TreeNode &node, int64_t &n) {
  std::set<std::string> keys;
  for (const auto &b : node.branches) {
    bool negated = b.cond->kind == ExprKind::kLogic && b.cond->logic == LogicOp::kNot;
    keys.insert(Print(negated ? b.cond->kids[0] : b.cond));
    CountLogical(b.body, n);
  }
  n += static_cast<int64_t>(keys.size());
}

void CountInter(const TreeNode &node, int64_t &n) {
  for (const auto &c : node.constraints) {
    if (c.unliftable || !c.pred) continue;
    std::set<std::string> ps = ReferencedParams(c.pred);
    if (c.forall) {
      for (const auto &p : ReferencedParams(c.forall->lo)) ps.insert(p);
      for (const auto &p : ReferencedParams(c.forall->hi)) ps.insert(p);
    }
    if (ps.size() >= 2) ++n;
  }
  for (const auto &b : node.branches) CountInter(b.body, n);
}

std::string HandleState(const HandleTable &handles, const ParamValue &v) {
  const auto *h = std::get_if<HandleRef>(&v);
  if (!h) return "unknown";
  if (h->id == 0) return "null";
  const HandleTable::Entry *e = handles.Find(h->id);
  if (!e) return "unknown";
  return e->open ? "open" : "closed";
}

struct FindingKey {
  CrashKind kind;
  std::string kernel;
  int block;
  auto operator<=>(const FindingKey &) const = default;
};

// Shared state of one arm across operators.
struct ArmState {
  Strategy arm;
  std::set<FindingKey> seen;
  std::vector<Finding> findings;
  std::map<std::string, std::deque<TestInput>> reuse;  // target op -> queued inputs
  std::set<std::string> done;
};

class OpCampaign {
 public:
  OpCampaign(const CampaignSetup &setup, const CampaignConfig &cfg, const OpSpec &spec, ArmState &arm)
      : s_(setup),
        cfg_(cfg),
        spec_(spec),
        kernel_(setup.corpus->KernelOf(spec)),
        ctrl_(setup.controls.at(spec.name)),
        arm_(arm),
        op_seed_(cfg.seed ^ Fnv1a(spec.name)) {
    env_.handles = &handles_;
    if (const TestScript *script = setup.corpus->ScriptOf(spec.name))
      for (const auto &f : script->fixtures) env_.files[f.name] = f.bytes;
    for (const auto &t : setup.templates.at(spec.name)) {
      if (t.rejected) ++rejected_paths_;
      else usable_.push_back(&t);
    }
  }

  OpReport Run() {
    OpReport r;
    r.op = spec_.name;
    r.strategy = std::string(StrategyName(arm_.arm));
    r.kernel_id = spec_.kernel_id;
    r.total_blocks = kernel_.blocks.size();
    r.paths = static_cast<int64_t>(s_.templates.at(spec_.name).size());
    r.rejected_paths = rejected_paths_;
    const TreeNode &tree = s_.trees.at(spec_.name).root;
    r.inter_param_constraints = InterParamConstraints(tree);
    r.logical_nodes = LogicalNodes(tree);
    r.unfillable = ctrl_.unfillable;
    r.note = ctrl_.reason;
    if (arm_.arm == Strategy::kGuided) ChooseSequence(r);

    auto checkpoints = Checkpoints(cfg_.iterations);
    size_t next_cp = 0;
    std::set<int> covered;
    auto start = std::chrono::steady_clock::now();
    for (int64_t i = 0; i < cfg_.iterations; ++i) {
      if (cfg_.budget_secs > 0) {
        std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
        if (el.count() > cfg_.budget_secs) break;
      }
      ExecMode mode = cfg_.modes[static_cast<size_t>(i) % cfg_.modes.size()];
      bool reused = false;
      TestInput in = Next(i, r, reused);
      in.mode = mode;
      ExecOutcome out = Execute(kernel_, in, mode, env_);
      ++r.executions;
      ++r.provenance[std::string(ProvenanceName(in.provenance))];
      covered.insert(out.covered.begin(), out.covered.end());
      if (out.truncated) ++r.truncated;
      if (out.IsReject()) {
        ++r.rejects;
      } else {
        ++r.successful;
        if (out.IsCrash()) {
          ++r.crashes;
          Record(in, out, i, r);
        } else if (arm_.arm == Strategy::kGuided && !reused) {
          Share(in);
        }
      }
      while (next_cp < checkpoints.size() && checkpoints[next_cp] == i + 1) {
        r.timeline.push_back({i + 1, static_cast<int64_t>(covered.size())});
        ++next_cp;
      }
    }
    r.blocks_covered = covered.size();
    arm_.done.insert(spec_.name);
    return r;
  }

 private:
  bool HasResources() const {
    return std::any_of(spec_.params.begin(), spec_.params.end(),
                       [](const ParamDecl &p) { return p.container == Container::kResource; });
  }

  const DataTemplate *FirstUsable(const std::string &op) const {
    for (const auto &t : s_.templates.at(op))
      if (!t.rejected) return &t;
    return nullptr;
  }

  // Executes the prerequisite operators and returns the last handle produced.
  int64_t RunPrefix(const std::vector<std::string> &prefix, uint64_t seed, ExecEnv &env) {
    int64_t handle = 0;
    for (size_t j = 0; j < prefix.size(); ++j) {
      const OpSpec *spec = s_.corpus->registry.Find(prefix[j]);
      if (!spec) continue;
      std::map<std::string, ParamValue> pinned;
      for (const auto &p : spec->params)
        if (p.container == Container::kResource) pinned[p.name] = HandleRef{handle};
      uint64_t sj = MixSeed(seed, 100 + j);
      TestInput in;
      if (const DataTemplate *t = FirstUsable(spec->name)) {
        in = GenerateInput(*t, s_.controls.at(spec->name), sj, pinned);
      } else {
        in = GenerateRandom(*spec, sj);
        for (const auto &[k, v] : pinned) in.values[k] = v;
      }
      ExecOutcome out = Execute(s_.corpus->KernelOf(*spec), in, ExecMode::kEager, env);
      for (const auto &[_, v] : out.outputs)
        if (const auto *h = std::get_if<HandleRef>(&v)) handle = h->id;
    }
    return handle;
  }

  void CloseHandle(int64_t handle, uint64_t seed, ExecEnv &env) {
    const EntityGroup *g = GroupOf(s_.groups, spec_.name);
    if (g) {
      for (const auto &[member, verbs] : g->verbs) {
        if (verbs.find("Close") == std::string::npos) continue;
        const OpSpec *spec = s_.corpus->registry.Find(member);
        if (!spec) continue;
        std::map<std::string, ParamValue> pinned;
        for (const auto &p : spec->params)
          if (p.container == Container::kResource) pinned[p.name] = HandleRef{handle};
        const DataTemplate *t = FirstUsable(member);
        if (!t) break;
        TestInput in = GenerateInput(*t, s_.controls.at(member), MixSeed(seed, 200), pinned);
        Execute(s_.corpus->KernelOf(*spec), in, ExecMode::kEager, env);
        if (const auto *e = env.handles->Find(handle); e && !e->open) return;
      }
    }
    env.handles->Close(handle);
  }

  // Known sequences give the prefix directly; otherwise every ordering of up
  // to two other group members is tried and the shortest success kept.
  void ChooseSequence(OpReport &r) {
    if (!HasResources()) return;
    if (!ctrl_.sequence.empty()) {
      prefix_.assign(ctrl_.sequence.begin(), ctrl_.sequence.begin() + ctrl_.position);
      r.sequence = prefix_;
      return;
    }
    std::vector<std::string> others;
    if (const EntityGroup *g = GroupOf(s_.groups, spec_.name))
      for (const auto &[member, _] : g->verbs)
        if (member != spec_.name) others.push_back(member);
    std::vector<std::vector<std::string>> cands = {{}};
    for (const auto &a : others) cands.push_back({a});
    for (const auto &a : others)
      for (const auto &b : others)
        if (a != b) cands.push_back({a, b});
    std::stable_sort(cands.begin(), cands.end(), [](const auto &x, const auto &y) {
      return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    const DataTemplate *t = FirstUsable(spec_.name);
    bool chosen = false;
    for (size_t c = 0; c < cands.size(); ++c) {
      HandleTable handles;
      ExecEnv env = env_;
      env.handles = &handles;
      uint64_t seed = MixSeed(op_seed_, 1000 + c, 7);
      int64_t h = RunPrefix(cands[c], seed, env);
      std::map<std::string, ParamValue> pinned;
      for (const auto &p : spec_.params)
        if (p.container == Container::kResource) pinned[p.name] = HandleRef{h};
      TestInput in;
      if (t) in = GenerateInput(*t, ctrl_, seed, pinned);
      else in = GenerateRandom(spec_, seed);
      for (const auto &[k, v] : pinned) in.values[k] = v;
      bool ok = Execute(kernel_, in, ExecMode::kEager, env).verdict == Verdict::kSuccess;
      std::vector<std::string> full = cands[c];
      full.push_back(spec_.name);
      r.sequence_trials.push_back({full, ok});
      if (ok && !chosen) {
        prefix_ = cands[c];
        chosen = true;
      }
    }
    if (!chosen) {
      for (const auto &[_, producer] : ctrl_.producers) prefix_ = {producer};
    }
    r.sequence = prefix_;
  }

  std::map<std::string, ParamValue> Handles(uint64_t seed) {
    std::map<std::string, ParamValue> pinned;
    if (!HasResources()) return pinned;
    Rng rng(MixSeed(seed, 3));
    uint64_t pick = rng.Below(10);
    int64_t h = 0;
    if (pick < 9) {
      h = RunPrefix(prefix_, seed, env_);
      if (pick >= 7 && h != 0) CloseHandle(h, seed, env_);
    }
    for (const auto &p : spec_.params)
      if (p.container == Container::kResource) pinned[p.name] = HandleRef{h};
    return pinned;
  }

  TestInput Next(int64_t i, OpReport &r, bool &reused) {
    if (arm_.arm == Strategy::kRandom) {
      uint64_t seed = MixSeed(op_seed_, static_cast<uint64_t>(i), kSeedRandom);
      return GenerateRandom(spec_, seed);
    }
    auto q = arm_.reuse.find(spec_.name);
    if (q != arm_.reuse.end() && !q->second.empty()) {
      TestInput in = std::move(q->second.front());
      q->second.pop_front();
      in.provenance = Provenance::kReused;
      ++r.reuse;
      reused = true;
      return in;
    }
    uint64_t seed = MixSeed(op_seed_, static_cast<uint64_t>(i), kSeedGuided);
    auto pinned = Handles(seed);
    if (usable_.empty()) {
      TestInput in = GenerateRandom(spec_, seed);
      for (const auto &[k, v] : pinned) in.values[k] = v;
      return in;
    }
    // Probes come in runs as long as the mode cycle so that every mode sees
    // them; a graph-mode prepass reject never reaches the failure block.
    int64_t cycle = static_cast<int64_t>(cfg_.modes.size());
    bool probe = (i / cycle) % kProbePeriod == kProbePeriod - 1;
    // Every mode in a probe run breaks the same check.
    size_t probe_run = static_cast<size_t>(i / (cycle * kProbePeriod));
    const DataTemplate &t = *usable_[(probe ? probe_run : path_count_) % usable_.size()];
    TestInput in = GenerateInput(t, ctrl_, seed, pinned);
    if (probe) {
      // Boundary probe: break one check of the path so its failure block is
      // exercised too.
      std::vector<const Constraint *> checks;
      for (size_t c = t.guards.size(); c < t.constraints.size(); ++c)
        if (!t.constraints[c].unliftable) checks.push_back(&t.constraints[c]);
      if (!checks.empty()) {
        const Constraint &c = *checks[probe_run / usable_.size() % checks.size()];
        auto moves = ViolationMoves(c, in);
        if (!moves.empty()) {
          Rng rng(MixSeed(seed, 4));
          Provenance p = in.provenance;
          in = moves[rng.Below(moves.size())];
          in.provenance = p;
          ++r.probes;
        }
      }
    } else {
      ++path_count_;
    }
    return in;
  }

  void Record(const TestInput &in, const ExecOutcome &out, int64_t i, OpReport &r) {
    FindingKey key{out.kind, out.kernel_id, out.block};
    if (!arm_.seen.insert(key).second) return;
    Finding f;
    f.strategy = std::string(StrategyName(arm_.arm));
    f.kind = out.kind;
    f.kernel_id = out.kernel_id;
    f.block = out.block;
    f.op = spec_.name;
    f.iteration = i;
    f.label = ClassifyCausality(in, spec_, s_.roles.at(spec_.kernel_id));
    f.message = out.message;
    f.input = in;
    for (const auto &p : spec_.params)
      if (p.container == Container::kResource)
        if (const ParamValue *v = in.Find(p.name)) f.handle_states[p.name] = HandleState(handles_, *v);
    arm_.findings.push_back(std::move(f));
    ++r.findings;
  }

  // Success inputs are queued for the other members of the kernel group.
  void Share(const TestInput &in) {
    if (HasResources()) return;
    auto g = s_.corpus->registry.kernel_groups.find(spec_.kernel_id);
    if (g == s_.corpus->registry.kernel_groups.end()) return;
    for (const auto &member : g->second) {
      if (member == spec_.name || arm_.done.count(member)) continue;
      const OpSpec *other = s_.corpus->registry.Find(member);
      if (!other || other->params != spec_.params) continue;
      auto &q = arm_.reuse[member];
      if (q.size() >= kReuseCap || std::find(q.begin(), q.end(), in) != q.end()) continue;
      q.push_back(in);
    }
  }

  const CampaignSetup &s_;
  const CampaignConfig &cfg_;
  const OpSpec &spec_;
  const KernelIR &kernel_;
  const ControlTemplate &ctrl_;
  ArmState &arm_;
  uint64_t op_seed_;
  HandleTable handles_;
  ExecEnv env_;
  std::vector<const DataTemplate *> usable_;
  int64_t rejected_paths_ = 0;
  std::vector<std::string> prefix_;
  size_t path_count_ = 0;
};

}  // namespace

CampaignSetup PrepareCampaign(const Corpus &corpus, const std::vector<ExecMode> &modes) {
  CampaignSetup s;
  s.corpus = &corpus;
  for (const auto &[id, k] : corpus.kernels) {
    s.extracted[id] = ExtractConstraints(k);
    s.roles[id] = ComputeParamRoles(k, s.extracted[id].taint);
  }
  std::vector<std::string> names;
  for (const auto &spec : corpus.registry.testable) names.push_back(spec.name);
  s.groups = ClusterEntities(names);
  std::vector<std::vector<std::string>> seqs;
  CollectSequences(corpus, seqs);
  AttachSequences(s.groups, seqs);
  for (const auto &spec : corpus.registry.testable) {
    ConstraintTree tree = LiftToSpec(s.extracted.at(spec.kernel_id).tree, spec);
    tree.op = spec.name;
    s.templates[spec.name] = BuildDataTemplates(spec, tree.root);
    s.trees[spec.name] = std::move(tree);
    s.controls[spec.name] =
        BuildControlTemplate(spec, corpus.registry, s.groups, corpus.ScriptOf(spec.name), modes);
  }
  return s;
}

int64_t DependencyCount(const OpSpec &spec, const ControlTemplate &ctrl) {
  int64_t n = 0;
  for (const auto &p : spec.params)
    if (p.container == Container::kResource || p.container == Container::kFilePath) ++n;
  if (!ctrl.sequence.empty()) ++n;
  return n;
}

int64_t InterParamConstraints(const TreeNode &tree) {
  int64_t n = 0;
  CountInter(tree, n);
  return n;
}

int64_t LogicalNodes(const TreeNode &tree) {
  int64_t n = 0;
  CountLogical(tree, n);
  return n;
}

std::vector<int64_t> Checkpoints(int64_t iterations) {
  std::vector<int64_t> out;
  for (int64_t j = 1; j <= 10; ++j) {
    int64_t c = (iterations * j + 9) / 10;
    if (c >= 1 && (out.empty() || out.back() != c)) out.push_back(c);
  }
  return out;
}

CampaignReport RunCampaign(const CampaignConfig &config, const Corpus &corpus) {
  CampaignReport report;
  report.config = config;
  CampaignSetup setup = PrepareCampaign(corpus, config.modes);

  std::vector<const OpSpec *> ops;
  for (const auto &spec : corpus.registry.testable) {
    if (!config.ops.empty() &&
        std::find(config.ops.begin(), config.ops.end(), spec.name) == config.ops.end())
      continue;
    ops.push_back(&spec);
  }
  for (const auto &name : config.ops)
    if (!corpus.registry.Find(name)) throw Error("config names unknown operator '" + name + "'");

  std::vector<OpConstraintInput> stats_in;
  for (const OpSpec *spec : ops)
    stats_in.push_back({spec->name, &setup.trees.at(spec->name).root,
                        static_cast<int64_t>(config.modes.size()),
                        DependencyCount(*spec, setup.controls.at(spec->name))});
  report.stats = ClassifyConstraints(stats_in);

  std::vector<Strategy> arms;
  if (config.strategy != Strategy::kRandom) arms.push_back(Strategy::kGuided);
  if (config.strategy != Strategy::kGuided) arms.push_back(Strategy::kRandom);
  auto checkpoints = Checkpoints(config.iterations);
  for (Strategy arm : arms) {
    ArmState state;
    state.arm = arm;
    std::vector<int64_t> totals(checkpoints.size(), 0);
    for (const OpSpec *spec : ops) {
      OpCampaign c(setup, config, *spec, state);
      OpReport r = c.Run();
      int64_t last = 0;
      for (size_t j = 0; j < checkpoints.size(); ++j) {
        if (j < r.timeline.size()) last = r.timeline[j].second;
        totals[j] += last;
      }
      report.operators.push_back(std::move(r));
    }
    for (size_t j = 0; j < checkpoints.size(); ++j)
      report.timeline.push_back({std::string(StrategyName(arm)), checkpoints[j], totals[j]});
    for (auto &f : state.findings) report.findings.push_back(std::move(f));
  }
  std::stable_sort(report.operators.begin(), report.operators.end(), [](const OpReport &a, const OpReport &b) {
    return a.op != b.op ? a.op < b.op : a.strategy < b.strategy;
  });
  return report;
}

}  // namespace opfuzz
