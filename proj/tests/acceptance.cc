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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Budgets and tolerances are fixed here, not taken from the
// command line.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "opfuzz/campaign.h"
#include "opfuzz/corpus.h"
#include "opfuzz/generator.h"
#include "opfuzz/report.h"
#include "oracles.h"

namespace fs = std::filesystem;
using namespace opfuzz;

namespace {

constexpr uint64_t kSeed = 42;
constexpr int64_t kIterations = 10000;
constexpr int64_t kSoundnessBudget = int64_t{1} << 19;  // bindings per kernel
constexpr double kGoldenSecs = 10;
constexpr double kSoundnessSecs = 180;
constexpr double kRecallSecs = 300;
constexpr size_t kMinKernels = 20;
constexpr size_t kMinBugs = 8;

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Cmd {
  int status = -1;
  std::string out;
};

Cmd Run(const std::string &cmd) {
  Cmd r;
  FILE *p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string Slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string Hex(uint64_t h) {
  char b[17];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
  return b;
}

int failures = 0;

void Report(int id, const std::string &name, bool ok, const std::string &detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << detail << std::endl;
}

// Runs a criterion, turning an escaped exception into a failure line.
void Criterion(int id, const std::string &name, const std::function<void()> &body) {
  try {
    body();
  } catch (const std::exception &e) {
    Report(id, name, false, std::string("exception: ") + e.what());
  }
}

CampaignConfig Config(Strategy s) {
  CampaignConfig cfg;
  cfg.seed = kSeed;
  cfg.iterations = kIterations;
  cfg.modes = {ExecMode::kEager, ExecMode::kGraph};
  cfg.strategy = s;
  cfg.corpus = OPFUZZ_CORPUS_DIR;
  return cfg;
}

}  // namespace

int main() {
  const std::string cli = OPFUZZ_CLI;
  const std::string corpus_dir = OPFUZZ_CORPUS_DIR;
  fs::path work = fs::temp_directory_path() / "opfuzz_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  Corpus corpus = LoadCorpus(corpus_dir);

  Criterion(1, "golden extraction", [&] {
    auto t0 = Clock::now();
    Cmd r = Run(cli + " --corpus " + corpus_dir + " extract --golden-check");
    double secs = Since(t0);
    std::set<std::string> kernels;
    for (const auto &s : corpus.registry.testable) kernels.insert(s.kernel_id);
    bool zero = r.out.find(", 0 mismatches") != std::string::npos;
    bool ok = r.status == 0 && zero && kernels.size() >= kMinKernels && secs < kGoldenSecs;
    std::ostringstream d;
    d << "exit " << r.status << ", " << (zero ? "0 mismatches" : "mismatches reported") << ", " << kernels.size()
      << " kernels (min " << kMinKernels << "), " << secs << " s (limit " << kGoldenSecs << ")";
    Report(1, "golden extraction", ok, d.str());
  });

  Criterion(2, "lifting soundness", [&] {
    auto t0 = Clock::now();
    int64_t bindings = 0, bad = 0, exhaustive = 0;
    std::string first;
    for (const auto &[id, k] : corpus.kernels) {
      auto r = oracle::CheckLiftingSoundness(k, kSoundnessBudget, kSeed);
      bindings += r.bindings;
      bad += r.failures;
      exhaustive += r.exhaustive;
      if (first.empty() && !r.counterexamples.empty()) first = id + " " + r.counterexamples[0];
    }
    double secs = Since(t0);
    std::ostringstream d;
    d << corpus.kernels.size() << " kernels (" << exhaustive << " exhaustive), " << bindings << " bindings, " << bad
      << " counterexamples, " << secs << " s (limit " << kSoundnessSecs << ")";
    if (!first.empty()) d << "; first: " << first;
    Report(2, "lifting soundness", bad == 0 && secs < kSoundnessSecs, d.str());
  });

  Criterion(3, "seeded-bug recall", [&] {
    auto t0 = Clock::now();
    CampaignReport r = RunCampaign(Config(Strategy::kGuided), corpus);
    double secs = Since(t0);
    std::set<std::string> kinds;
    int found = 0;
    std::string missing;
    bool fig12 = false;
    for (const auto &b : corpus.bugs) {
      kinds.insert(std::string(CrashKindName(b.kind)));
      bool hit = false;
      for (const auto &f : r.findings)
        if (f.strategy == "guided" && f.kind == b.kind && f.kernel_id == b.kernel_id && f.block == b.block &&
            f.label == b.label)
          hit = true;
      found += hit;
      if (!hit) missing += " " + b.id;
      if (hit && b.kernel_id == "BTCBFSKernel" && b.kind == CrashKind::kOOB && b.label == "SHAPE_BIG_INDEX")
        fig12 = true;
    }
    bool ok = found == static_cast<int>(corpus.bugs.size()) && corpus.bugs.size() >= kMinBugs && kinds.size() == 5 &&
              fig12 && secs < kRecallSecs;
    std::ostringstream d;
    d << found << "/" << corpus.bugs.size() << " manifest bugs (min " << kMinBugs << "), " << kinds.size()
      << " kinds, BTCBFS big-index OOB " << (fig12 ? "found" : "missing") << ", " << secs << " s (limit "
      << kRecallSecs << ")";
    if (!missing.empty()) d << "; missing:" << missing;
    Report(3, "seeded-bug recall", ok, d.str());
  });

  // One both-strategy run backs criteria 4, 5 and 7; criterion 6 re-runs the
  // same config twice through the CLI.
  fs::path cfg_path = work / "both.cfg";
  std::ofstream(cfg_path) << "seed = " << kSeed << "\niterations = " << kIterations
                          << "\nmodes = eager, graph\nstrategy = both\ncorpus = " << corpus_dir
                          << "\nreport = " << (work / "report.json").string() << "\n";
  CampaignReport both = RunCampaign(Config(Strategy::kBoth), corpus);

  Criterion(4, "dominance", [&] {
    std::map<std::string, const OpReport *> guided, random;
    for (const auto &o : both.operators) (o.strategy == "guided" ? guided : random)[o.op] = &o;
    int inter = 0, inter_ok = 0, logical = 0, logical_ok = 0, cov_ok = 0;
    std::string bad;
    for (const auto &[op, g] : guided) {
      const OpReport *rnd = random.at(op);
      if (g->inter_param_constraints > 0) {
        ++inter;
        if (g->valid_rate() > rnd->valid_rate()) ++inter_ok;
        else bad += " valid:" + op;
      }
      bool every = g->timeline.size() == rnd->timeline.size();
      for (size_t i = 0; every && i < g->timeline.size(); ++i)
        every = g->timeline[i].first == rnd->timeline[i].first && g->timeline[i].second >= rnd->timeline[i].second;
      if (every) ++cov_ok;
      else bad += " coverage:" + op;
      if (g->logical_nodes > 0) {
        ++logical;
        if (!g->timeline.empty() && !rnd->timeline.empty() &&
            g->timeline.back().second > rnd->timeline.back().second)
          ++logical_ok;
        else bad += " final:" + op;
      }
    }
    fs::path report = work / "dominance.json";
    WriteReport(both, report.string());
    Cmd cmp = Run(cli + " compare --guided " + report.string() + " --random " + report.string());
    bool ok = inter > 0 && inter_ok == inter && cov_ok == static_cast<int>(guided.size()) && logical > 0 &&
              logical_ok == logical && cmp.status == 0;
    std::ostringstream d;
    d << "valid rate " << inter_ok << "/" << inter << " inter-param ops, coverage >= at every checkpoint "
      << cov_ok << "/" << guided.size() << " ops, final strictly greater " << logical_ok << "/" << logical
      << " logical-node ops, compare exit " << cmp.status;
    if (!bad.empty()) d << "; violations:" << bad;
    Report(4, "dominance", ok, d.str());
  });

  Criterion(5, "module placement and kernel-group reuse", [&] {
    std::vector<OpSpec> aliased;
    for (const auto &s : corpus.registry.all)
      if (!s.aliases.empty()) aliased.push_back(s);
    auto want = oracle::MinimalPlacements(aliased);
    int agree = 0;
    for (const auto &[op, path] : want) agree += corpus.registry.tree.PathOf(op) == path;
    const auto &kg = corpus.registry.kernel_groups;
    auto it = kg.find("ArgKernel");
    bool shared = it != kg.end() && it->second == std::vector<std::string>{"ArgMax", "ArgMin"};
    int64_t reuse = 0;
    for (const auto &o : both.operators)
      if (o.strategy == "guided" && (o.op == "ArgMax" || o.op == "ArgMin")) reuse += o.reuse;
    bool ok = !want.empty() && agree == static_cast<int>(want.size()) && shared && reuse >= 1;
    std::ostringstream d;
    d << agree << "/" << want.size() << " aliased ops at the brute-force minimum path, ArgMax/ArgMin "
      << (shared ? "share ArgKernel" : "not grouped") << ", reuse counter " << reuse;
    Report(5, "module placement and kernel-group reuse", ok, d.str());
  });

  Criterion(6, "determinism", [&] {
    std::string a = (work / "det_a.json").string(), b = (work / "det_b.json").string();
    Cmd ra = Run(cli + " fuzz --config " + cfg_path.string() + " && cp " + (work / "report.json").string() + " " + a);
    Cmd rb = Run(cli + " fuzz --config " + cfg_path.string() + " && cp " + (work / "report.json").string() + " " + b);
    std::string ba = Slurp(a), bb = Slurp(b);
    uint64_t ha = Fnv1a(ba), hb = Fnv1a(bb);
    bool ok = ra.status == 0 && rb.status == 0 && !ba.empty() && ba == bb;
    std::ostringstream d;
    d << "run hashes " << Hex(ha) << " / " << Hex(hb) << ", " << ba.size() << " bytes"
      << (ba == bb ? ", identical" : ", different");
    Report(6, "determinism", ok, d.str());
  });

  Criterion(7, "constraint taxonomy", [&] {
    const auto &want = corpus.manifest.at("golden_stats").at("by_category");
    const auto &cat = both.stats.by_category;
    std::ostringstream d;
    bool ok = true;
    for (const char *k : {"environmental", "dependency", "validation", "logical"}) {
      auto it = cat.find(k);
      int64_t got = it == cat.end() ? -1 : it->second;
      int64_t exp = want.at(k).get<int64_t>();
      ok &= it != cat.end() && got == exp;
      d << k << " " << got << "/" << exp << ", ";
    }
    ok &= cat.at("validation") > 0 && cat.at("logical") > 0;
    for (const char *k : {"ndim", "shape", "size", "value", "dtype"}) {
      auto it = both.stats.single_param.find(k);
      ok &= it != both.stats.single_param.end() && it->second > 0;
      d << k << " " << (it == both.stats.single_param.end() ? -1 : it->second) << " ";
    }
    Report(7, "constraint taxonomy", ok, d.str());
  });

  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : "acceptance: all criteria passed")
            << std::endl;
  return failures ? 1 : 0;
}
