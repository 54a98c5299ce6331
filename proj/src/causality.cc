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

#include "opfuzz/causality.h"

#include <algorithm>
#include <functional>

namespace opfuzz {

namespace {

constexpr int64_t kBigIndex = int64_t{1} << 20;
constexpr int64_t kBigInt = int64_t{1} << 31;

// Calls `fn` on every integer held by the value; stops when it returns true.
bool AnyInt(const ParamValue &v, const std::function<bool(int64_t)> &fn) {
  if (const auto *s = std::get_if<Scalar>(&v)) {
    const auto *i = std::get_if<int64_t>(s);
    return i && fn(*i);
  }
  const auto *t = std::get_if<TensorVal>(&v);
  if (!t || t->empty()) return false;
  auto test = [&](const Scalar &s) {
    const auto *i = std::get_if<int64_t>(&s);
    return i && fn(*i);
  };
  if (t->lazy()) {
    if (test(t->fill())) return true;
    for (const auto &[_, s] : t->overrides())
      if (test(s)) return true;
    return false;
  }
  return std::any_of(t->data().begin(), t->data().end(), test);
}

}  // namespace

const std::vector<std::string> &CausalityLabels() {
  static const std::vector<std::string> kLabels = {
      "SHAPE_ZERO_DIM", "SHAPE_BIG_INDEX", "VALUE_ZERO", "VALUE_BIG_INT",
      "VALUE_NEGATIVE", "TYPE_MISMATCH",   "OTHER"};
  return kLabels;
}

std::string ClassifyCausality(const TestInput &in, const OpSpec &spec, const ParamRoles &roles) {
  std::vector<std::pair<const ParamDecl *, const ParamValue *>> data;
  for (const auto &p : spec.params) {
    if (p.container == Container::kFilePath) continue;
    if (const ParamValue *v = in.Find(p.name)) data.push_back({&p, v});
  }
  auto tensor = [](const ParamValue *v) { return std::get_if<TensorVal>(v); };

  for (const auto &[p, v] : data) {
    const TensorVal *t = tensor(v);
    if (t && (t->rank() == 0 || std::count(t->shape().begin(), t->shape().end(), 0) > 0))
      return "SHAPE_ZERO_DIM";
  }
  for (const auto &[p, v] : data)
    if (roles.index.count(p->name) && AnyInt(*v, [](int64_t x) { return x >= kBigIndex; }))
      return "SHAPE_BIG_INDEX";
  for (const auto &[p, v] : data)
    if (roles.divisor.count(p->name) && AnyInt(*v, [](int64_t x) { return x == 0; }))
      return "VALUE_ZERO";
  for (const auto &[p, v] : data)
    if (AnyInt(*v, [](int64_t x) { return x > kBigInt || x < -kBigInt; })) return "VALUE_BIG_INT";
  for (const auto &[p, v] : data) {
    const TensorVal *t = tensor(v);
    if (t && std::any_of(t->shape().begin(), t->shape().end(), [](int64_t e) { return e < 0; }))
      return "VALUE_NEGATIVE";
    bool sized = roles.index.count(p->name) || roles.size_like.count(p->name);
    if (sized && AnyInt(*v, [](int64_t x) { return x < 0; })) return "VALUE_NEGATIVE";
  }
  for (const auto &[p, v] : data) {
    const TensorVal *t = tensor(v);
    if (t && std::find(p->dtypes.begin(), p->dtypes.end(), t->dtype()) == p->dtypes.end())
      return "TYPE_MISMATCH";
  }
  return "OTHER";
}

}  // namespace opfuzz
