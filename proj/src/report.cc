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

#include "opfuzz/report.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "opfuzz/value_json.h"

namespace opfuzz {

using nlohmann::json;

json StatsToJson(const ConstraintStats &s) {
  json j;
  j["by_category"] = s.by_category;
  j["single_param"] = s.single_param;
  j["param_pairs"] = s.param_pairs;
  j["single_param_constraints"] = s.single_param_constraints;
  j["multi_param_constraints"] = s.multi_param_constraints;
  j["unliftable"] = s.unliftable;
  return j;
}

namespace {

json OpToJson(const OpReport &r) {
  json j;
  j["op"] = r.op;
  j["strategy"] = r.strategy;
  j["kernel"] = r.kernel_id;
  j["executions"] = r.executions;
  j["successful"] = r.successful;
  j["rejects"] = r.rejects;
  j["crashes"] = r.crashes;
  j["truncated"] = r.truncated;
  j["valid_rate"] = r.valid_rate();
  j["blocks_covered"] = r.blocks_covered;
  j["total_blocks"] = r.total_blocks;
  j["findings"] = r.findings;
  j["reuse"] = r.reuse;
  j["probes"] = r.probes;
  j["provenance"] = r.provenance;
  j["paths"] = r.paths;
  j["rejected_paths"] = r.rejected_paths;
  j["inter_param_constraints"] = r.inter_param_constraints;
  j["logical_nodes"] = r.logical_nodes;
  j["sequence"] = r.sequence;
  j["sequence_trials"] = json::array();
  for (const auto &t : r.sequence_trials)
    j["sequence_trials"].push_back({{"sequence", t.sequence}, {"success", t.success}});
  j["unfillable"] = r.unfillable;
  j["note"] = r.note;
  j["timeline"] = json::array();
  for (const auto &[it, blocks] : r.timeline)
    j["timeline"].push_back({{"iteration", it}, {"blocks", blocks}});
  return j;
}

json FindingToJson(const Finding &f) {
  json j;
  j["strategy"] = f.strategy;
  j["kind"] = CrashKindName(f.kind);
  j["kernel"] = f.kernel_id;
  j["block"] = f.block;
  j["op"] = f.op;
  j["iteration"] = f.iteration;
  j["label"] = f.label;
  j["message"] = f.message;
  j["input"] = TestInputToJson(f.input);
  j["handles"] = f.handle_states;
  return j;
}

}  // namespace

json ReportToJson(const CampaignReport &r) {
  json j;
  j["config"] = r.config.ToJson();
  j["operators"] = json::array();
  for (const auto &op : r.operators) j["operators"].push_back(OpToJson(op));
  j["timeline"] = json::array();
  for (const auto &p : r.timeline)
    j["timeline"].push_back({{"strategy", p.strategy}, {"iteration", p.iteration}, {"blocks", p.blocks}});
  j["constraint_stats"] = StatsToJson(r.stats);
  j["findings"] = json::array();
  for (const auto &f : r.findings) j["findings"].push_back(FindingToJson(f));
  return j;
}

void WriteReport(const CampaignReport &r, const std::string &path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write report " + path);
  f << ReportToJson(r).dump(2) << "\n";
  if (!f) throw Error("failed writing report " + path);
}

json ReadReport(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read report " + path);
  try {
    return json::parse(f);
  } catch (const json::exception &e) {
    throw Error("malformed report " + path + ": " + e.what());
  }
}

namespace {

std::map<std::string, const json *> ArmOps(const json &report, const std::string &strategy) {
  std::map<std::string, const json *> out;
  for (const auto &op : report.at("operators"))
    if (op.at("strategy") == strategy) out[op.at("op").get<std::string>()] = &op;
  return out;
}

}  // namespace

std::vector<std::string> CompareReports(const json &guided, const json &random) {
  std::vector<std::string> v;
  const json &gc = guided.at("config");
  const json &rc = random.at("config");
  if (gc.at("iterations") != rc.at("iterations") || gc.at("seed") != rc.at("seed"))
    v.push_back("arms differ in seed or iteration budget");
  auto g = ArmOps(guided, "guided");
  auto r = ArmOps(random, "random");
  if (g.empty()) v.push_back("no guided operators in the guided report");
  for (const auto &[name, gj] : g) {
    auto it = r.find(name);
    if (it == r.end()) {
      v.push_back(name + ": missing from the random report");
      continue;
    }
    const json &rj = *it->second;
    double gv = gj->at("valid_rate"), rv = rj.at("valid_rate");
    if (gj->at("inter_param_constraints").get<int64_t>() > 0 && !(gv > rv)) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s: guided valid rate %.4f not above random %.4f", name.c_str(), gv, rv);
      v.push_back(buf);
    }
    const json &gt = gj->at("timeline");
    const json &rt = rj.at("timeline");
    if (gt.size() != rt.size()) {
      v.push_back(name + ": timelines have different checkpoints");
      continue;
    }
    for (size_t k = 0; k < gt.size(); ++k) {
      int64_t gb = gt[k].at("blocks"), rb = rt[k].at("blocks");
      if (gb < rb)
        v.push_back(name + ": guided coverage " + std::to_string(gb) + " below random " +
                    std::to_string(rb) + " at iteration " + gt[k].at("iteration").dump());
    }
    if (gj->at("logical_nodes").get<int64_t>() > 0 && !gt.empty() &&
        !(gt.back().at("blocks").get<int64_t>() > rt.back().at("blocks").get<int64_t>()))
      v.push_back(name + ": guided final coverage not above random despite logical nodes");
  }
  return v;
}

std::string SummarizeReport(const json &report) {
  std::ostringstream out;
  const json &cfg = report.at("config");
  out << "seed " << cfg.at("seed") << ", " << cfg.at("iterations") << " iterations/op, strategy "
      << cfg.at("strategy").get<std::string>() << "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-28s %-7s %8s %8s %7s %9s %5s\n", "operator", "arm", "execs",
                "valid", "rate", "blocks", "finds");
  out << line;
  for (const auto &op : report.at("operators")) {
    std::string blocks = op.at("blocks_covered").dump() + "/" + op.at("total_blocks").dump();
    std::snprintf(line, sizeof(line), "%-28s %-7s %8lld %8lld %7.3f %9s %5lld\n",
                  op.at("op").get<std::string>().c_str(), op.at("strategy").get<std::string>().c_str(),
                  static_cast<long long>(op.at("executions").get<int64_t>()),
                  static_cast<long long>(op.at("successful").get<int64_t>()),
                  op.at("valid_rate").get<double>(), blocks.c_str(),
                  static_cast<long long>(op.at("findings").get<int64_t>()));
    out << line;
  }
  out << "findings:\n";
  for (const auto &f : report.at("findings"))
    out << "  [" << f.at("strategy").get<std::string>() << "] " << f.at("kind").get<std::string>() << " "
        << f.at("kernel").get<std::string>() << " block " << f.at("block") << " via "
        << f.at("op").get<std::string>() << " (" << f.at("label").get<std::string>() << ", iteration "
        << f.at("iteration") << ")\n";
  return out.str();
}

}  // namespace opfuzz
