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

#ifndef OPFUZZ_REPORT_H_
#define OPFUZZ_REPORT_H_

#include <string>
#include <vector>

#include "opfuzz/campaign.h"
#include "json.hpp"

namespace opfuzz {

nlohmann::json StatsToJson(const ConstraintStats &s);
// Top-level keys: config, operators, timeline, constraint_stats, findings.
nlohmann::json ReportToJson(const CampaignReport &r);
// Writes the JSON with sorted keys and a trailing newline; throws Error on
// I/O failure.
void WriteReport(const CampaignReport &r, const std::string &path);
nlohmann::json ReadReport(const std::string &path);

// Dominance checks between a guided and a random arm. Either document may be
// a both-strategy report; entries are picked by their strategy field. Returns
// one line per violation.
std::vector<std::string> CompareReports(const nlohmann::json &guided, const nlohmann::json &random);

// Human-readable summary for `opfuzz report`.
std::string SummarizeReport(const nlohmann::json &report);

}  // namespace opfuzz

#endif  // OPFUZZ_REPORT_H_
