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

#include "opfuzz/constraint_tree.h"

#include <algorithm>
#include <map>
#include <sstream>

namespace opfuzz {

std::string Constraint::Print() const {
  if (unliftable) return "unliftable: " + opaque;
  std::string body = opfuzz::Print(pred);
  if (!forall) return body;
  return "forall " + forall->var + " in [" + opfuzz::Print(forall->lo) + ", " +
         opfuzz::Print(forall->hi) + "): " + body;
}

bool TreeNode::empty() const { return constraints.empty() && branches.empty(); }

void TreeNode::AddConstraint(Constraint c) {
  std::string text = c.Print();
  for (const auto &have : constraints)
    if (have.Print() == text) return;
  constraints.push_back(std::move(c));
}

TreeNode &TreeNode::BranchFor(const ExprPtr &cond, int block) {
  std::string text = opfuzz::Print(cond);
  for (auto &b : branches)
    if (opfuzz::Print(b.cond) == text) return b.body;
  branches.push_back(Branch{cond, block, {}});
  return branches.back().body;
}

namespace {

void SerializeInto(const TreeNode &node, int depth, std::string &out) {
  std::string indent(static_cast<size_t>(depth) * 2, ' ');
  for (const auto &c : node.constraints) out += indent + c.Print() + "\n";
  for (const auto &b : node.branches) {
    out += indent + "branch: " + Print(b.cond) + "\n";
    SerializeInto(b.body, depth + 1, out);
  }
}

std::string CanonicalInto(const TreeNode &node, int depth) {
  std::string indent(static_cast<size_t>(depth) * 2, ' ');
  std::vector<std::string> lines;
  for (const auto &c : node.constraints) lines.push_back(indent + c.Print() + "\n");
  std::sort(lines.begin(), lines.end());
  std::vector<std::string> branches;
  for (const auto &b : node.branches)
    branches.push_back(indent + "branch: " + Print(b.cond) + "\n" + CanonicalInto(b.body, depth + 1));
  std::sort(branches.begin(), branches.end());
  std::string out;
  for (const auto &l : lines) out += l;
  for (const auto &b : branches) out += b;
  return out;
}

[[noreturn]] void Fail(const std::string &file, int line, const std::string &msg) {
  throw ParseError(file, line, 1, msg);
}

// Splits "lo, hi): pred" at the top-level comma and closing parenthesis.
void SplitQuantifier(const std::string &s, const std::string &file, int line, std::string &lo,
                     std::string &hi, std::string &pred) {
  int depth = 0;
  size_t comma = std::string::npos;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') {
      if (depth == 0) {
        if (comma == std::string::npos) Fail(file, line, "forall bounds need 'lo, hi'");
        lo = s.substr(0, comma);
        hi = s.substr(comma + 1, i - comma - 1);
        size_t colon = s.find_first_not_of(' ', i + 1);
        if (colon == std::string::npos || s[colon] != ':') Fail(file, line, "expected ':' after forall bounds");
        pred = s.substr(colon + 1);
        return;
      }
      --depth;
    }
    if (c == ',' && depth == 0 && comma == std::string::npos) comma = i;
  }
  Fail(file, line, "unterminated forall bounds");
}

}  // namespace

std::string Serialize(const TreeNode &root) {
  std::string out;
  SerializeInto(root, 0, out);
  return out;
}

std::string CanonicalText(const TreeNode &root) { return CanonicalInto(root, 0); }

TreeNode ParseTree(std::string_view text, const std::string &file) {
  TreeNode root;
  // Stack of (depth, node) for the currently open branches.
  std::vector<std::pair<int, TreeNode *>> stack{{0, &root}};
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    size_t first = raw.find_first_not_of(' ');
    if (first == std::string::npos || raw[first] == '#') continue;
    if (first % 2 != 0) Fail(file, line, "indentation must be a multiple of two spaces");
    int depth = static_cast<int>(first / 2);
    std::string body = raw.substr(first);
    while (stack.back().first > depth) stack.pop_back();
    if (stack.back().first != depth) Fail(file, line, "indentation skips a level");
    TreeNode &node = *stack.back().second;
    auto parse = [&](const std::string &s, const std::set<std::string> &vars = {}) {
      return ParseConstraintExpr(s, vars, file, line);
    };
    if (body.rfind("branch:", 0) == 0) {
      ExprPtr cond = parse(body.substr(7));
      TreeNode &child = node.BranchFor(cond, -1);
      stack.push_back({depth + 1, &child});
    } else if (body.rfind("unliftable:", 0) == 0) {
      Constraint c;
      c.unliftable = true;
      size_t start = body.find_first_not_of(' ', 11);
      c.opaque = start == std::string::npos ? "" : body.substr(start);
      node.AddConstraint(std::move(c));
    } else if (body.rfind("forall ", 0) == 0) {
      size_t in_pos = body.find(" in [");
      if (in_pos == std::string::npos) Fail(file, line, "expected 'forall VAR in [lo, hi): pred'");
      Quantifier q;
      q.var = body.substr(7, in_pos - 7);
      std::string lo, hi, pred;
      SplitQuantifier(body.substr(in_pos + 5), file, line, lo, hi, pred);
      q.lo = parse(lo);
      q.hi = parse(hi);
      Constraint c;
      c.pred = parse(pred, {q.var});
      c.forall = std::move(q);
      node.AddConstraint(std::move(c));
    } else {
      Constraint c;
      c.pred = parse(body);
      node.AddConstraint(std::move(c));
    }
  }
  return root;
}

std::string TreePath::Label() const {
  if (guards.empty()) return "root";
  std::string out;
  for (const auto &g : guards) out += (out.empty() ? "" : " & ") + Print(g);
  return out;
}

namespace {

void Combine(std::vector<TreePath> &acc, const std::vector<TreePath> &alts, size_t limit) {
  std::vector<TreePath> next;
  for (const auto &a : acc) {
    for (const auto &b : alts) {
      if (next.size() >= limit) break;
      TreePath p = a;
      p.guards.insert(p.guards.end(), b.guards.begin(), b.guards.end());
      p.constraints.insert(p.constraints.end(), b.constraints.begin(), b.constraints.end());
      next.push_back(std::move(p));
    }
  }
  acc = std::move(next);
}

std::vector<TreePath> PathsOf(const TreeNode &node, size_t limit) {
  TreePath base;
  for (const auto &c : node.constraints) base.constraints.push_back(&c);
  std::vector<TreePath> acc{base};
  // Logical nodes keyed by the printed positive condition, in first-seen order.
  std::vector<std::string> order;
  std::map<std::string, std::pair<const Branch *, const Branch *>> sides;
  std::map<std::string, ExprPtr> positive;
  for (const auto &b : node.branches) {
    bool negated = b.cond->kind == ExprKind::kLogic && b.cond->logic == LogicOp::kNot;
    ExprPtr pos = negated ? b.cond->kids[0] : b.cond;
    std::string key = Print(pos);
    if (!sides.count(key)) {
      order.push_back(key);
      positive[key] = pos;
      sides[key] = {nullptr, nullptr};
    }
    (negated ? sides[key].second : sides[key].first) = &b;
  }
  for (const auto &key : order) {
    std::vector<TreePath> alts;
    for (int side = 0; side < 2; ++side) {
      const Branch *b = side == 0 ? sides[key].first : sides[key].second;
      ExprPtr guard = side == 0 ? positive[key] : Normalize(ex::Not(positive[key]));
      std::vector<TreePath> sub = b ? PathsOf(b->body, limit) : std::vector<TreePath>{TreePath{}};
      for (auto &s : sub) {
        s.guards.insert(s.guards.begin(), guard);
        alts.push_back(std::move(s));
      }
    }
    Combine(acc, alts, limit);
  }
  return acc;
}

}  // namespace

std::vector<TreePath> EnumeratePaths(const TreeNode &root, size_t limit) {
  return PathsOf(root, limit);
}

size_t CountConstraints(const TreeNode &node) {
  size_t n = node.constraints.size();
  for (const auto &b : node.branches) n += CountConstraints(b.body);
  return n;
}

size_t CountBranches(const TreeNode &node) {
  size_t n = node.branches.size();
  for (const auto &b : node.branches) n += CountBranches(b.body);
  return n;
}

}  // namespace opfuzz
