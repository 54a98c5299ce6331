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

#include "opfuzz/classify.h"

#include <algorithm>
#include <set>

namespace opfuzz {

namespace {

// Atom that fixes a single parameter's extent or value directly.
bool IsBareSource(const ExprPtr &e) {
  switch (e->kind) {
    case ExprKind::kAttr:
    case ExprKind::kSize:
    case ExprKind::kNdim:
      return true;
    case ExprKind::kDim:
      return e->kids[0]->IsLiteral();
    default:
      return false;
  }
}

void CollectEqualities(const TreeNode &node, std::vector<ExprPtr> &out) {
  auto visit = [&](const ExprPtr &e) {
    for (const auto &c : Conjuncts(e))
      if (c->kind == ExprKind::kCmp && c->cmp == CmpOp::kEq) out.push_back(c);
  };
  for (const auto &c : node.constraints)
    if (!c.unliftable && !c.forall) visit(c.pred);
  for (const auto &b : node.branches) {
    visit(b.cond);
    CollectEqualities(b.body, out);
  }
}

}  // namespace

ParamOrder ToposortParams(const TreeNode &tree, const OpSpec &spec) {
  ParamOrder result;
  auto decl = [&](const std::string &p) { return spec.ParamIndex(p); };
  auto is_attr = [&](const std::string &p) {
    const ParamDecl *d = spec.FindParam(p);
    return d && d->role == ParamRole::kAttr;
  };
  std::set<std::pair<std::string, std::string>> edges;
  auto add = [&](const std::string &from, const std::string &to) {
    if (from != to && decl(from) >= 0 && decl(to) >= 0) edges.insert({from, to});
  };

  std::vector<ExprPtr> eqs;
  CollectEqualities(tree, eqs);
  for (const auto &eq : eqs) {
    const ExprPtr &l = eq->kids[0], &r = eq->kids[1];
    bool lb = IsBareSource(l), rb = IsBareSource(r);
    auto lp = ReferencedParams(l), rp = ReferencedParams(r);
    if (lb != rb) {
      const ExprPtr &src = lb ? l : r;
      for (const auto &p : lb ? rp : lp) add(src->name, p);
      continue;
    }
    if (lb && rb && l->name != r->name) {
      bool la = is_attr(l->name), ra = is_attr(r->name);
      if (la != ra) {
        la ? add(l->name, r->name) : add(r->name, l->name);
      } else {
        decl(l->name) < decl(r->name) ? add(l->name, r->name) : add(r->name, l->name);
      }
      continue;
    }
    // Neither side is a bare source: scalar attrs go before the tensors they
    // shape, e.g. `(dim(t, 3) % k) == 0`.
    std::set<std::string> all = lp;
    all.insert(rp.begin(), rp.end());
    for (const auto &q : all)
      if (is_attr(q))
        for (const auto &p : all)
          if (!is_attr(p)) add(q, p);
  }
  result.edges.assign(edges.begin(), edges.end());

  std::vector<std::string> remaining;
  for (const auto &p : spec.params) remaining.push_back(p.name);
  while (!remaining.empty()) {
    auto ready = std::find_if(remaining.begin(), remaining.end(), [&](const std::string &p) {
      for (const auto &[from, to] : edges)
        if (to == p && std::find(remaining.begin(), remaining.end(), from) != remaining.end())
          return false;
      return true;
    });
    if (ready == remaining.end()) {
      ready = remaining.begin();
      result.warnings.push_back(spec.name + ": dependency cycle broken at '" + *ready + "'");
    }
    result.order.push_back(*ready);
    remaining.erase(ready);
  }
  return result;
}

namespace {

void ClassifyNode(const TreeNode &node, ConstraintStats &s) {
  for (const auto &c : node.constraints) {
    ++s.by_category["validation"];
    if (c.unliftable) {
      ++s.unliftable;
      continue;
    }
    std::vector<AtomRef> atoms;
    CollectAtoms(c.pred, atoms);
    if (c.forall) {
      CollectAtoms(c.forall->lo, atoms);
      CollectAtoms(c.forall->hi, atoms);
    }
    // First attribute seen per parameter, in printed order.
    std::vector<AtomRef> params;
    for (const auto &a : atoms)
      if (std::none_of(params.begin(), params.end(), [&](const AtomRef &p) { return p.param == a.param; }))
        params.push_back(a);
    if (params.size() == 1) {
      ++s.single_param_constraints;
      ++s.single_param[params[0].attribute];
    } else if (params.size() >= 2) {
      ++s.multi_param_constraints;
      for (size_t i = 0; i < params.size(); ++i)
        for (size_t j = i + 1; j < params.size(); ++j) {
          std::string a = params[i].attribute, b = params[j].attribute;
          if (b < a) std::swap(a, b);
          ++s.param_pairs[a + "&" + b];
        }
    }
  }
  for (const auto &b : node.branches) {
    ++s.by_category["logical"];
    ClassifyNode(b.body, s);
  }
}

}  // namespace

ConstraintStats ClassifyConstraints(const std::vector<OpConstraintInput> &ops) {
  ConstraintStats s;
  for (const char *cat : {"environmental", "dependency", "validation", "logical"}) s.by_category[cat] = 0;
  for (const char *attr : {"ndim", "shape", "size", "value", "dtype"}) s.single_param[attr] = 0;
  for (const auto &op : ops) {
    s.by_category["environmental"] += op.environmental;
    s.by_category["dependency"] += op.dependency;
    if (op.tree) ClassifyNode(*op.tree, s);
  }
  return s;
}

}  // namespace opfuzz
