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

#ifndef OPFUZZ_CAMPAIGN_H_
#define OPFUZZ_CAMPAIGN_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "opfuzz/classify.h"
#include "opfuzz/config.h"
#include "opfuzz/corpus.h"
#include "opfuzz/extractor.h"
#include "opfuzz/interpreter.h"
#include "opfuzz/templates.h"

namespace opfuzz {

struct Finding {
  std::string strategy;
  CrashKind kind = CrashKind::kOOB;
  std::string kernel_id;
  int block = -1;
  std::string op;
  int64_t iteration = 0;  // first seen, 0-based within the operator's arm
  std::string label;
  std::string message;
  TestInput input;
  std::map<std::string, std::string> handle_states;
};

struct SequenceTrial {
  std::vector<std::string> sequence;
  bool success = false;
};

struct OpReport {
  std::string op;
  std::string strategy;
  std::string kernel_id;
  int64_t executions = 0;
  int64_t successful = 0;  // Success or Crash
  int64_t rejects = 0;
  int64_t crashes = 0;
  int64_t truncated = 0;
  size_t blocks_covered = 0;
  size_t total_blocks = 0;
  int64_t findings = 0;
  int64_t reuse = 0;
  int64_t probes = 0;
  std::map<std::string, int64_t> provenance;
  int64_t paths = 0;
  int64_t rejected_paths = 0;
  int64_t inter_param_constraints = 0;
  int64_t logical_nodes = 0;
  std::vector<std::string> sequence;  // prerequisite operators run first
  std::vector<SequenceTrial> sequence_trials;
  bool unfillable = false;
  std::string note;
  std::vector<std::pair<int64_t, int64_t>> timeline;  // (iteration, blocks)

  double valid_rate() const {
    return executions ? static_cast<double>(successful) / static_cast<double>(executions) : 0.0;
  }
};

struct TimelinePoint {
  std::string strategy;
  int64_t iteration = 0;
  int64_t blocks = 0;
};

struct CampaignReport {
  CampaignConfig config;
  std::vector<OpReport> operators;  // sorted by (op, strategy)
  std::vector<TimelinePoint> timeline;
  ConstraintStats stats;
  std::vector<Finding> findings;
};

// Everything derived from the corpus once per campaign.
struct CampaignSetup {
  const Corpus *corpus = nullptr;
  std::map<std::string, ExtractResult> extracted;   // by kernel id
  std::map<std::string, ParamRoles> roles;          // by kernel id
  std::map<std::string, ConstraintTree> trees;      // by operator, lifted
  std::map<std::string, std::vector<DataTemplate>> templates;
  std::map<std::string, ControlTemplate> controls;
  std::vector<EntityGroup> groups;
};

CampaignSetup PrepareCampaign(const Corpus &corpus, const std::vector<ExecMode> &modes);

// Dependency constraints of one operator: resource and file params plus
// membership in a known operation sequence.
int64_t DependencyCount(const OpSpec &spec, const ControlTemplate &ctrl);

// Constraints that mention two or more parameters.
int64_t InterParamConstraints(const TreeNode &tree);
// Distinct logical nodes (branch conditions up to negation).
int64_t LogicalNodes(const TreeNode &tree);

// Iteration indices (1-based counts) at which timelines are sampled.
std::vector<int64_t> Checkpoints(int64_t iterations);

CampaignReport RunCampaign(const CampaignConfig &config, const Corpus &corpus);

}  // namespace opfuzz

#endif  // OPFUZZ_CAMPAIGN_H_
