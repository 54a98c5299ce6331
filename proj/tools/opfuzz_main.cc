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

// opfuzz command-line driver.
//
// Exit codes: 0 success, 1 usage or config error, 2 corpus error,
// 3 golden-check mismatch, 4 dominance violation in `compare`.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "opfuzz/campaign.h"
#include "opfuzz/config.h"
#include "opfuzz/constraint_tree.h"
#include "opfuzz/corpus.h"
#include "opfuzz/report.h"
#include "opfuzz/templates.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCorpus = 2;
constexpr int kExitGolden = 3;
constexpr int kExitDominance = 4;

int ListOps(const opfuzz::Corpus &c) {
  for (const auto &w : c.registry.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto &spec : c.registry.testable) {
    std::cout << spec.name << "\t" << spec.kernel_id << "\t"
              << opfuzz::JoinPath(c.registry.tree.PathOf(spec.name)) << "\n";
  }
  return 0;
}

int Extract(const opfuzz::Corpus &c, bool golden_check, const std::string &only) {
  opfuzz::CampaignSetup s = opfuzz::PrepareCampaign(c, {opfuzz::ExecMode::kEager});
  int checked = 0, mismatches = 0;
  for (const auto &[op, tree] : s.trees) {
    if (!only.empty() && op != only) continue;
    if (!golden_check) {
      std::cout << "# " << op << "\n" << opfuzz::Serialize(tree.root);
      for (const auto &o : tree.omissions) std::cout << "# omitted: " << o << "\n";
      continue;
    }
    auto g = c.golden.find(op);
    if (g == c.golden.end()) {
      std::cout << "MISSING " << op << ": no golden tree\n";
      ++mismatches;
      continue;
    }
    ++checked;
    std::string got = opfuzz::CanonicalText(tree.root);
    std::string want = opfuzz::CanonicalText(g->second);
    if (got != want) {
      ++mismatches;
      std::cout << "MISMATCH " << op << "\n--- golden\n" << want << "--- lifted\n" << got;
    }
  }
  if (golden_check) {
    std::cout << "golden-check: " << checked << " operators, " << mismatches << " mismatches\n";
    return mismatches ? kExitGolden : 0;
  }
  return 0;
}

int Templates(const opfuzz::Corpus &c, const std::string &op) {
  if (!c.registry.Find(op)) {
    std::cerr << "error: unknown operator '" << op << "'\n";
    return kExitUsage;
  }
  opfuzz::CampaignSetup s = opfuzz::PrepareCampaign(c, {opfuzz::ExecMode::kEager, opfuzz::ExecMode::kGraph});
  const opfuzz::ControlTemplate &ct = s.controls.at(op);
  std::cout << "control: " << op << "\n  kernel: " << ct.kernel_group << "\n  modes:";
  for (auto m : ct.modes) std::cout << " " << opfuzz::ExecModeName(m);
  std::cout << "\n";
  for (const auto &[p, f] : ct.file_fixtures) std::cout << "  fixture: " << p << " <- " << f << "\n";
  for (const auto &[p, prod] : ct.producers) std::cout << "  producer: " << p << " <- " << prod << "\n";
  if (!ct.sequence.empty()) {
    std::cout << "  sequence:";
    for (const auto &s2 : ct.sequence) std::cout << " " << s2;
    std::cout << " (position " << ct.position << ")\n";
  }
  if (ct.unfillable) std::cout << "  unfillable: " << ct.reason << "\n";
  for (const auto &t : s.templates.at(op)) std::cout << "path: " << t.label << "\n" << opfuzz::SerializeTemplate(t);
  return 0;
}

int Fuzz(const std::string &config_path) {
  opfuzz::CampaignConfig cfg;
  try {
    cfg = opfuzz::LoadConfig(config_path);
  } catch (const opfuzz::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  opfuzz::Corpus c;
  try {
    c = opfuzz::LoadCorpus(cfg.corpus);
  } catch (const opfuzz::Error &e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kExitCorpus;
  }
  opfuzz::CampaignReport r;
  try {
    r = opfuzz::RunCampaign(cfg, c);
  } catch (const opfuzz::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  opfuzz::WriteReport(r, cfg.report);
  std::cout << opfuzz::SummarizeReport(opfuzz::ReportToJson(r));
  std::cout << "report written to " << cfg.report << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Constraint-guided operator fuzzer"};
  app.require_subcommand(1);
  std::string corpus_dir = OPFUZZ_DEFAULT_CORPUS;
  app.add_option("--corpus", corpus_dir, "Corpus directory");

  auto *list = app.add_subcommand("list-ops", "List testable operators");
  bool golden = false;
  std::string only;
  auto *extract = app.add_subcommand("extract", "Print lifted constraint trees");
  extract->add_flag("--golden-check", golden, "Compare against golden trees");
  extract->add_option("--op", only, "Restrict to one operator");
  std::string op;
  auto *templates = app.add_subcommand("templates", "Print control and data templates");
  templates->add_option("op", op, "Operator name")->required();
  std::string config;
  auto *fuzz = app.add_subcommand("fuzz", "Run a campaign");
  fuzz->add_option("--config", config, "Campaign config file")->required();
  std::string report_path;
  auto *report = app.add_subcommand("report", "Summarize a report");
  report->add_option("path", report_path, "Report JSON")->required();
  std::string guided_path, random_path;
  auto *compare = app.add_subcommand("compare", "Check guided-over-random dominance");
  compare->add_option("--guided", guided_path, "Guided report")->required();
  compare->add_option("--random", random_path, "Random report")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (fuzz->parsed()) return Fuzz(config);
    if (report->parsed()) {
      std::cout << opfuzz::SummarizeReport(opfuzz::ReadReport(report_path));
      return 0;
    }
    if (compare->parsed()) {
      auto v = opfuzz::CompareReports(opfuzz::ReadReport(guided_path), opfuzz::ReadReport(random_path));
      for (const auto &line : v) std::cout << "VIOLATION " << line << "\n";
      std::cout << "compare: " << v.size() << " violations\n";
      return v.empty() ? 0 : kExitDominance;
    }
    opfuzz::Corpus c;
    try {
      c = opfuzz::LoadCorpus(corpus_dir);
    } catch (const opfuzz::Error &e) {
      std::cerr << "corpus error: " << e.what() << "\n";
      return kExitCorpus;
    }
    if (list->parsed()) return ListOps(c);
    if (extract->parsed()) return Extract(c, golden, only);
    if (templates->parsed()) return Templates(c, op);
  } catch (const opfuzz::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
