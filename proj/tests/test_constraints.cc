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


#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "opfuzz/classify.h"
#include "opfuzz/constraint_eval.h"
#include "opfuzz/constraint_expr.h"
#include "opfuzz/extractor.h"
#include "test_util.h"

using namespace opfuzz;
using opfuzz::testing::TestCorpus;

namespace {

TensorVal Ints(std::vector<int64_t> shape, std::vector<int64_t> v) {
  std::vector<Scalar> d(v.begin(), v.end());
  return TensorVal::Dense(DType::kDtInt64, std::move(shape), std::move(d));
}

TreeNode LiftedTree(const std::string &op) {
  const auto &c = TestCorpus();
  const OpSpec &spec = *c.registry.Find(op);
  return LiftToSpec(ExtractConstraints(c.KernelOf(spec)).tree, spec).root;
}

int Pos(const std::vector<std::string> &v, const std::string &x) {
  return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

TEST_CASE("evaluate: row_remapping length matches num_rows") {
  TestInput in;
  in.values["row_remapping"] = Ints({1}, {1});
  in.values["num_rows"] = Scalar(int64_t{1});
  CHECK(Evaluate(ParseConstraintExpr("size(row_remapping) == num_rows"), in));
  in.values["num_rows"] = Scalar(int64_t{2});
  CHECK_FALSE(Evaluate(ParseConstraintExpr("size(row_remapping) == num_rows"), in));
}

TEST_CASE("evaluate: scalar tensor has ndim 0") {
  TestInput in;
  in.values["x"] = TensorVal::ScalarTensor(DType::kDtInt64, int64_t{5});
  CHECK(Evaluate(ParseConstraintExpr("ndim(x) == 0"), in));
  CHECK(Evaluate(ParseConstraintExpr("val(x) == 5"), in));
}

TEST_CASE("evaluate: out-of-range atoms and zero divisors are false") {
  TestInput in;
  in.values["x"] = Ints({2}, {3, 0});
  CHECK_FALSE(Evaluate(ParseConstraintExpr("val(x, 5) == 0"), in));
  CHECK_FALSE(Evaluate(ParseConstraintExpr("dim(x, 3) >= 0"), in));
  CHECK_FALSE(Evaluate(ParseConstraintExpr("(val(x, 0) / val(x, 1)) == 0"), in));
  // Negation of an undefined comparison is still undefined, hence false.
  CHECK_FALSE(Evaluate(ParseConstraintExpr("!(val(x, 5) == 0)"), in));
}

TEST_CASE("evaluate: division truncates toward zero") {
  TestInput in;
  in.values["a"] = Scalar(int64_t{-7});
  CHECK(Evaluate(ParseConstraintExpr("(a / 2) == -3"), in));
  CHECK(Evaluate(ParseConstraintExpr("(a % 2) == -1"), in));
}

TEST_CASE("evaluate: forall checks every index") {
  TestInput in;
  in.values["v"] = Ints({3}, {0, 1, 2});
  Constraint c;
  c.pred = ParseConstraintExpr("val(v, i) >= 0", {"i"});
  c.forall = Quantifier{"i", ex::Int(0), ex::Size("v")};
  CHECK(Evaluate(c, in));
  in.values["v"] = Ints({3}, {0, -1, 2});
  CHECK_FALSE(Evaluate(c, in));
  in.values["v"] = Ints({0}, {});
  CHECK(Evaluate(c, in));
}

TEST_CASE("expr: literal zero divisor is rejected at construction") {
  CHECK_THROWS_AS(ex::Bin(BinOp::kDiv, ex::Attr("a"), ex::Int(0)), Error);
  CHECK_THROWS_AS(ParseConstraintExpr("(a % 0) == 1"), Error);
}

TEST_CASE("expr: normalization canonicalizes comparisons") {
  CHECK(Print(Normalize(ParseConstraintExpr("a < b"))) == "b > a");
  CHECK(Print(Normalize(ParseConstraintExpr("a <= 3"))) == "3 >= a");
  CHECK(Print(Normalize(ParseConstraintExpr("size(x) == 1"))) == "1 == size(x)");
  CHECK(Print(Normalize(ParseConstraintExpr("!(!(a > 1))"))) == "a > 1");
  CHECK(Print(Normalize(ParseConstraintExpr("(2 + 3) == a"))) == "5 == a");
}

TEST_CASE("expr: printing round-trips through the parser") {
  for (const auto &[op, tree] : TestCorpus().golden) {
    std::string text = Serialize(tree);
    CAPTURE(op);
    CHECK(Serialize(ParseTree(text, op)) == text);
  }
}

TEST_CASE("expr: attribute mapping") {
  std::vector<AtomRef> atoms;
  CollectAtoms(ParseConstraintExpr("ndim(a) + dim(b, 0) + size(c) + val(d, 0) + e == 0"), atoms);
  REQUIRE(atoms.size() == 5);
  CHECK(atoms[0].attribute == "ndim");
  CHECK(atoms[1].attribute == "shape");
  CHECK(atoms[2].attribute == "size");
  CHECK(atoms[3].attribute == "value");
  CHECK(atoms[4].attribute == "value");
  atoms.clear();
  CollectAtoms(ParseConstraintExpr("dtype(a) == dtype(b)"), atoms);
  CHECK(atoms[0].attribute == "dtype");
}

TEST_CASE("toposort: LARM sizes come before the remapping tensors") {
  ParamOrder o = ToposortParams(LiftedTree("LoadAndRemapMatrix"), *TestCorpus().registry.Find("LoadAndRemapMatrix"));
  CHECK(Pos(o.order, "num_rows") < Pos(o.order, "row_remapping"));
  CHECK(Pos(o.order, "num_cols") < Pos(o.order, "col_remapping"));
  CHECK(o.warnings.empty());
}

TEST_CASE("toposort: BTCBFS logits_dimension comes before stats_summary") {
  ParamOrder o = ToposortParams(LiftedTree("BoostedTreesCalculateBestFeatureSplit"),
                                *TestCorpus().registry.Find("BoostedTreesCalculateBestFeatureSplit"));
  CHECK(Pos(o.order, "logits_dimension") < Pos(o.order, "stats_summary"));
}

TEST_CASE("toposort: no constraints keeps declaration order") {
  const OpSpec &spec = *TestCorpus().registry.Find("LoadAndRemapMatrix");
  ParamOrder o = ToposortParams(TreeNode{}, spec);
  REQUIRE(o.order.size() == spec.params.size());
  for (size_t i = 0; i < o.order.size(); ++i) CHECK(o.order[i] == spec.params[i].name);
}

TEST_CASE("toposort: cycles are broken with a warning") {
  OpSpec spec = ParseOpSpecs(R"(op { name: "C" module: "m" kernel: "K"
    input_arg { name: "a" type: DT_INT64 } input_arg { name: "b" type: DT_INT64 } })")[0];
  TreeNode t;
  Constraint c1, c2;
  c1.pred = ParseConstraintExpr("size(a) == val(b, 0)");
  c2.pred = ParseConstraintExpr("size(b) == val(a, 0)");
  t.AddConstraint(c1);
  t.AddConstraint(c2);
  ParamOrder o = ToposortParams(t, spec);
  CHECK(o.order.size() == 2);
  CHECK(o.warnings.size() >= 1);
}

TEST_CASE("property: toposort respects every edge and ignores constraint order") {
  std::mt19937 rng(11);
  for (const auto &spec : TestCorpus().registry.testable) {
    TreeNode tree = LiftedTree(spec.name);
    ParamOrder o = ToposortParams(tree, spec);
    CAPTURE(spec.name);
    if (o.warnings.empty())
      for (const auto &[from, to] : o.edges) CHECK(Pos(o.order, from) < Pos(o.order, to));
    for (int round = 0; round < 3; ++round) {
      std::shuffle(tree.constraints.begin(), tree.constraints.end(), rng);
      CHECK(ToposortParams(tree, spec).order == o.order);
    }
  }
}

TEST_CASE("classify: ArgMax dimension constraint is a single-param ndim check") {
  TreeNode t;
  Constraint c;
  c.pred = ParseConstraintExpr("ndim(dimension) == 0");
  t.AddConstraint(c);
  ConstraintStats s = ClassifyConstraints({{"ArgMax", &t, 0, 0}});
  CHECK(s.single_param["ndim"] == 1);
  CHECK(s.by_category["validation"] == 1);
  CHECK(s.single_param_constraints == 1);
}

TEST_CASE("classify: no trees gives zero stats with every bucket present") {
  ConstraintStats s = ClassifyConstraints({});
  CHECK(s.by_category.size() == 4);
  CHECK(s.single_param.size() == 5);
  for (const auto &[k, v] : s.by_category) CHECK(v == 0);
  for (const auto &[k, v] : s.single_param) CHECK(v == 0);
}

TEST_CASE("property: classification conserves counts and ignores order") {
  std::vector<TreeNode> trees;
  for (const auto &spec : TestCorpus().registry.testable) trees.push_back(LiftedTree(spec.name));
  std::vector<OpConstraintInput> in;
  for (size_t i = 0; i < trees.size(); ++i) in.push_back({"op" + std::to_string(i), &trees[i], 0, 0});
  ConstraintStats s = ClassifyConstraints(in);
  int64_t singles = 0;
  for (const auto &[k, v] : s.single_param) singles += v;
  CHECK(singles == s.single_param_constraints);
  CHECK(s.by_category["validation"] == s.single_param_constraints + s.multi_param_constraints + s.unliftable);
  size_t total = 0, branches = 0;
  for (const auto &t : trees) {
    total += CountConstraints(t);
    branches += CountBranches(t);
  }
  CHECK(static_cast<size_t>(s.by_category["validation"]) == total);
  CHECK(static_cast<size_t>(s.by_category["logical"]) == branches);

  std::mt19937 rng(3);
  for (auto &t : trees) std::shuffle(t.constraints.begin(), t.constraints.end(), rng);
  std::reverse(in.begin(), in.end());
  ConstraintStats s2 = ClassifyConstraints(in);
  CHECK(s2.by_category == s.by_category);
  CHECK(s2.single_param == s.single_param);
  CHECK(s2.param_pairs == s.param_pairs);
}
