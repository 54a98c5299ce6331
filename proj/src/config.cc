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

#include "opfuzz/config.h"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace opfuzz {

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kGuided: return "guided";
    case Strategy::kRandom: return "random";
    case Strategy::kBoth: return "both";
  }
  return "?";
}

nlohmann::json CampaignConfig::ToJson() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["iterations"] = iterations;
  j["modes"] = nlohmann::json::array();
  for (ExecMode m : modes) j["modes"].push_back(ExecModeName(m));
  j["strategy"] = StrategyName(strategy);
  j["corpus"] = corpus;
  j["report"] = report;
  j["ops"] = ops;
  j["budget_secs"] = budget_secs;
  return j;
}

namespace {

std::string Trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> SplitList(const std::string &v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
bool ParseNumber(const std::string &s, T &out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

CampaignConfig ParseConfig(std::string_view text, const std::string &file) {
  CampaignConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string l = Trim(raw.substr(0, raw.find('#')));
    if (l.empty()) continue;
    size_t eq = l.find('=');
    if (eq == std::string::npos) throw ParseError(file, line, 1, "expected 'key = value'");
    std::string key = Trim(l.substr(0, eq));
    std::string val = Trim(l.substr(eq + 1));
    auto fail = [&](const std::string &msg) { throw ParseError(file, line, 1, msg); };
    if (!seen.insert(key).second) fail("duplicate key '" + key + "'");
    if (key == "seed") {
      if (!ParseNumber(val, cfg.seed)) fail("seed must be a non-negative integer");
    } else if (key == "iterations") {
      if (!ParseNumber(val, cfg.iterations) || cfg.iterations < 1) fail("iterations must be >= 1");
    } else if (key == "modes") {
      cfg.modes.clear();
      for (const auto &m : SplitList(val)) {
        auto mode = ExecModeFromName(m);
        if (!mode) fail("unknown mode '" + m + "'");
        cfg.modes.push_back(*mode);
      }
      if (cfg.modes.empty()) fail("modes must not be empty");
    } else if (key == "strategy") {
      if (val == "guided") cfg.strategy = Strategy::kGuided;
      else if (val == "random") cfg.strategy = Strategy::kRandom;
      else if (val == "both") cfg.strategy = Strategy::kBoth;
      else fail("strategy must be guided, random or both");
    } else if (key == "corpus") {
      cfg.corpus = val;
    } else if (key == "report") {
      cfg.report = val;
    } else if (key == "ops") {
      cfg.ops = SplitList(val);
    } else if (key == "budget_secs") {
      try {
        size_t used = 0;
        cfg.budget_secs = std::stod(val, &used);
        if (used != val.size() || cfg.budget_secs < 0) fail("budget_secs must be >= 0");
      } catch (const std::logic_error &) {
        fail("budget_secs must be a number");
      }
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return cfg;
}

CampaignConfig LoadConfig(const std::string &path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseConfig(ss.str(), path);
}

}  // namespace opfuzz
