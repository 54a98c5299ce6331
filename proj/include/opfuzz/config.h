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

#ifndef OPFUZZ_CONFIG_H_
#define OPFUZZ_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "opfuzz/tensor.h"
#include "json.hpp"

namespace opfuzz {

enum class Strategy { kGuided, kRandom, kBoth };
std::string_view StrategyName(Strategy s);

struct CampaignConfig {
  uint64_t seed = 42;
  int64_t iterations = 10000;  // per operator and arm
  std::vector<ExecMode> modes = {ExecMode::kEager, ExecMode::kGraph};
  Strategy strategy = Strategy::kGuided;
  std::string corpus = "corpus";
  std::string report = "report.json";
  std::vector<std::string> ops;  // empty: every testable operator
  // Wall-clock cap per operator and arm; 0 disables it. Runs that hit the
  // cap are not reproducible.
  double budget_secs = 0;

  nlohmann::json ToJson() const;
};

// Line-oriented `key = value`; `#` starts a comment. Keys: seed, iterations,
// modes (comma list), strategy, corpus, report, ops (comma list),
// budget_secs. Throws ParseError on unknown keys or bad values.
CampaignConfig ParseConfig(std::string_view text, const std::string &file = "<config>");
CampaignConfig LoadConfig(const std::string &path);

}  // namespace opfuzz

#endif  // OPFUZZ_CONFIG_H_
