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

#include "opfuzz/corpus.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "opfuzz/lexer.h"
#include "opfuzz/value_json.h"

namespace opfuzz {

namespace fs = std::filesystem;

std::vector<TestScript> ParseTestScripts(std::string_view text, const std::string &file) {
  TokenStream ts(Tokenize(text, file), file);
  std::vector<TestScript> out;
  while (!ts.AtEnd()) {
    TestScript s;
    s.file = file;
    s.line = ts.Peek().line;
    ts.ExpectKeyword("test");
    s.op = ts.ExpectString();
    ts.ExpectPunct("{");
    std::set<std::string> names;
    while (!ts.ConsumePunct("}")) {
      Token kw = ts.Peek();
      if (ts.ConsumeIdent("fixture")) {
        ts.ExpectKeyword("file");
        Fixture f;
        f.name = ts.ExpectString();
        ts.ExpectKeyword("bytes");
        Token n = ts.Next();
        if (n.kind != Token::Kind::kInt || n.int_value < 0) ts.FailAt(n, "fixture size must be a non-negative integer");
        f.bytes = n.int_value;
        if (ts.ConsumeIdent("fill")) {
          Token b = ts.Next();
          if (b.kind != Token::Kind::kInt || b.int_value < 0 || b.int_value > 255)
            ts.FailAt(b, "fill must be a byte value");
          f.fill = static_cast<uint8_t>(b.int_value);
        }
        ts.ExpectPunct(";");
        if (!names.insert(f.name).second) ts.FailAt(kw, "duplicate fixture '" + f.name + "'");
        s.fixtures.push_back(std::move(f));
      } else if (ts.ConsumeIdent("seq")) {
        std::vector<std::string> seq;
        while (!ts.ConsumePunct(";")) seq.push_back(ts.ExpectIdent());
        if (seq.empty()) ts.FailAt(kw, "empty sequence");
        s.sequences.push_back(std::move(seq));
      } else {
        ts.FailAt(kw, "expected 'fixture' or 'seq'");
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string ReadFile(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> ListFiles(const fs::path &dir, const std::string &ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string Where(const OpSpec &s) { return s.source_file + ":" + std::to_string(s.source_line); }

void CheckKernelMatchesSpec(const KernelIR &k, const OpSpec &spec) {
  auto fail = [&](const std::string &msg) {
    throw CorpusError(Where(spec) + ": operator " + spec.name + " does not match kernel " +
                      k.kernel_id + ": " + msg);
  };
  if (k.params.size() != spec.params.size()) fail("parameter count differs");
  for (size_t i = 0; i < k.params.size(); ++i) {
    const KernelParam &kp = k.params[i];
    const ParamDecl &sp = spec.params[i];
    if (kp.name != sp.name) fail("parameter " + std::to_string(i) + " is '" + kp.name + "' in the kernel");
    if (kp.role != sp.role || kp.container != sp.container) fail("role or container of '" + kp.name + "'");
    if (kp.dtypes != sp.dtypes) fail("dtypes of '" + kp.name + "'");
    if (kp.entity != sp.entity) fail("entity of '" + kp.name + "'");
  }
}

BugEntry BugFromJson(const nlohmann::json &j) {
  BugEntry b;
  b.id = j.at("id").get<std::string>();
  b.op = j.at("op").get<std::string>();
  b.kernel_id = j.at("kernel").get<std::string>();
  b.block = j.at("block").get<int>();
  auto kind = CrashKindFromName(j.at("kind").get<std::string>());
  if (!kind) throw CorpusError("manifest bug " + b.id + ": unknown crash kind");
  b.kind = *kind;
  b.label = j.at("label").get<std::string>();
  b.witness = TestInputFromJson(j.at("witness"));
  if (j.contains("handles"))
    for (const auto &[p, st] : j.at("handles").items()) b.handle_states[p] = st.get<std::string>();
  return b;
}

}  // namespace

const KernelIR &Corpus::KernelOf(const OpSpec &spec) const {
  auto it = kernels.find(spec.kernel_id);
  if (it == kernels.end()) throw CorpusError("operator " + spec.name + " has no kernel");
  return it->second;
}

const TestScript *Corpus::ScriptOf(const std::string &op) const {
  auto it = scripts.find(op);
  return it == scripts.end() ? nullptr : &it->second;
}

Corpus LoadCorpus(const std::string &dir) {
  Corpus c;
  c.dir = dir;
  fs::path root(dir);
  auto op_files = ListFiles(root / "ops", ".ops");
  if (op_files.empty()) throw CorpusError(dir + ": no descriptors found");
  for (const auto &f : op_files)
    for (auto &s : ParseOpSpecs(ReadFile(f), f.string())) c.specs.push_back(std::move(s));

  std::set<std::string> kernel_ids;
  for (const auto &f : ListFiles(root / "kernels", ".krn")) {
    KernelIR k = ParseKernel(ReadFile(f), f.string());
    if (!kernel_ids.insert(k.kernel_id).second)
      throw CorpusError(f.string() + ": duplicate kernel '" + k.kernel_id + "'");
    c.kernel_files[k.kernel_id] = f.string();
    c.kernels.emplace(k.kernel_id, std::move(k));
  }
  try {
    c.registry = BuildRegistry(c.specs, kernel_ids);
  } catch (const CorpusError &) {
    throw;
  } catch (const ParseError &) {
    throw;
  } catch (const Error &e) {
    throw CorpusError(e.what());
  }
  for (const auto &s : c.specs) {
    if (s.kernel_id.empty()) continue;
    auto k = c.kernels.find(s.kernel_id);
    if (k == c.kernels.end())
      throw CorpusError(s.source_file + ":" + std::to_string(s.source_line) + ": op " + s.name +
                        " binds unknown kernel '" + s.kernel_id + "'");
    CheckKernelMatchesSpec(k->second, s);
  }

  auto known_op = [&](const std::string &name) {
    return std::any_of(c.specs.begin(), c.specs.end(), [&](const OpSpec &s) { return s.name == name; });
  };
  for (const auto &f : ListFiles(root / "tests", ".test")) {
    for (auto &s : ParseTestScripts(ReadFile(f), f.string())) {
      std::string at = s.file + ":" + std::to_string(s.line);
      if (!known_op(s.op)) throw CorpusError(at + ": test script for unknown operator '" + s.op + "'");
      for (const auto &seq : s.sequences)
        for (const auto &op : seq)
          if (!known_op(op)) throw CorpusError(at + ": sequence names unknown operator '" + op + "'");
      if (c.scripts.count(s.op)) throw CorpusError(at + ": second test script for '" + s.op + "'");
      c.scripts.emplace(s.op, std::move(s));
    }
  }
  for (const auto &f : ListFiles(root / "golden", ".ctree")) {
    std::string op = f.stem().string();
    const OpSpec *spec = c.registry.Find(op);
    if (!spec) throw CorpusError(f.string() + ": golden tree for unknown operator '" + op + "'");
    c.golden.emplace(op, ParseTree(ReadFile(f), f.string()));
  }

  fs::path manifest = root / "manifest.json";
  if (!fs::exists(manifest)) throw CorpusError(dir + ": manifest.json missing");
  try {
    c.manifest = nlohmann::json::parse(ReadFile(manifest));
    for (const auto &j : c.manifest.value("bugs", nlohmann::json::array())) c.bugs.push_back(BugFromJson(j));
  } catch (const nlohmann::json::exception &e) {
    throw CorpusError(manifest.string() + ": " + e.what());
  }
  for (const auto &b : c.bugs) {
    const OpSpec *spec = c.registry.Find(b.op);
    if (!spec) throw CorpusError(manifest.string() + ": bug " + b.id + " names unknown operator " + b.op);
    if (spec->kernel_id != b.kernel_id)
      throw CorpusError(manifest.string() + ": bug " + b.id + " kernel differs from its operator's");
  }
  return c;
}

std::map<std::string, std::string> ProvisionFixtures(const TestScript &script, const std::string &workdir) {
  std::map<std::string, std::string> out;
  if (script.fixtures.empty()) return out;
  fs::create_directories(workdir);
  for (const auto &f : script.fixtures) {
    fs::path p = fs::path(workdir) / f.name;
    std::ofstream o(p, std::ios::binary | std::ios::trunc);
    if (!o) throw Error("cannot create fixture " + p.string());
    std::string chunk(4096, static_cast<char>(f.fill));
    for (int64_t left = f.bytes; left > 0; left -= static_cast<int64_t>(chunk.size()))
      o.write(chunk.data(), std::min<int64_t>(left, static_cast<int64_t>(chunk.size())));
    if (!o) throw Error("cannot write fixture " + p.string());
    out[f.name] = p.string();
  }
  return out;
}

ExecOutcome ReplayWitness(const Corpus &corpus, const BugEntry &bug, ExecMode mode) {
  const OpSpec *spec = corpus.registry.Find(bug.op);
  if (!spec) throw CorpusError("unknown operator " + bug.op);
  const KernelIR &k = corpus.KernelOf(*spec);
  HandleTable handles;
  ExecEnv env;
  env.handles = &handles;
  if (const TestScript *s = corpus.ScriptOf(bug.op))
    for (const auto &f : s->fixtures) env.files[f.name] = f.bytes;
  TestInput in = bug.witness;
  for (const auto &[param, state] : bug.handle_states) {
    const ParamDecl *p = spec->FindParam(param);
    if (!p) throw CorpusError("bug " + bug.id + ": unknown handle param " + param);
    int64_t id = 0;
    if (state != "null") {
      id = handles.Create(p->entity);
      if (state == "closed") handles.Close(id);
    }
    in.values[param] = HandleRef{id};
  }
  return Execute(k, in, mode, env);
}

}  // namespace opfuzz
