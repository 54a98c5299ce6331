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

#include "opfuzz/tensor.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <utility>

namespace opfuzz {

std::string ScalarToString(const Scalar &s) {
  if (const auto *i = std::get_if<int64_t>(&s)) return std::to_string(*i);
  if (const auto *d = std::get_if<double>(&s)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", *d);
    std::string out = buf;
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
  }
  return "\"" + std::get<std::string>(s) + "\"";
}

bool IsNumeric(const Scalar &s) { return !std::holds_alternative<std::string>(s); }

Scalar ZeroOf(ElemKind kind) {
  switch (kind) {
    case ElemKind::kFloat:
      return 0.0;
    case ElemKind::kString:
      return std::string();
    default:
      return int64_t{0};
  }
}

std::optional<int64_t> CheckedAdd(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<int64_t> CheckedSub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<int64_t> CheckedMul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

std::optional<int64_t> ShapeProduct(std::span<const int64_t> shape) {
  int64_t n = 1;
  for (int64_t e : shape) {
    auto m = CheckedMul(n, e);
    if (!m) return std::nullopt;
    n = *m;
  }
  return n;
}

namespace {
bool HasNegativeExtent(const std::vector<int64_t> &shape) {
  return std::any_of(shape.begin(), shape.end(), [](int64_t e) { return e < 0; });
}
}  // namespace

TensorVal TensorVal::Dense(DType dtype, std::vector<int64_t> shape,
                           std::vector<Scalar> data) {
  auto n = ShapeProduct(shape);
  if (HasNegativeExtent(shape) || !n || *n != static_cast<int64_t>(data.size()))
    throw Error("dense tensor data does not match its shape");
  TensorVal t;
  t.dtype_ = dtype;
  t.shape_ = std::move(shape);
  t.data_ = std::move(data);
  t.fill_ = ZeroOf(ElemKindOf(dtype));
  return t;
}

TensorVal TensorVal::Filled(DType dtype, std::vector<int64_t> shape,
                            Scalar fill) {
  TensorVal t;
  t.dtype_ = dtype;
  t.shape_ = std::move(shape);
  t.fill_ = std::move(fill);
  auto n = ShapeProduct(t.shape_);
  if (!HasNegativeExtent(t.shape_) && n && *n <= 64) {
    t.data_.assign(static_cast<size_t>(*n), t.fill_);
  } else {
    t.lazy_ = true;
  }
  return t;
}

TensorVal TensorVal::ScalarTensor(DType dtype, Scalar v) {
  return Dense(dtype, {}, {std::move(v)});
}

bool TensorVal::empty() const {
  if (HasNegativeExtent(shape_)) return true;
  auto n = size();
  return n && *n <= 0;
}

std::optional<int64_t> TensorVal::FlatIndex(std::span<const int64_t> idx) const {
  if (idx.size() != shape_.size()) return std::nullopt;
  int64_t flat = 0;
  for (size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape_[k]) return std::nullopt;
    // Cannot overflow: the product of in-range indices is below size().
    flat = flat * shape_[k] + idx[k];
  }
  return flat;
}

Scalar TensorVal::At(int64_t flat) const {
  if (!lazy_) return data_[static_cast<size_t>(flat)];
  auto it = overrides_.find(flat);
  return it == overrides_.end() ? fill_ : it->second;
}

void TensorVal::Set(int64_t flat, Scalar v) {
  if (!lazy_) {
    data_[static_cast<size_t>(flat)] = std::move(v);
  } else {
    overrides_[flat] = std::move(v);
  }
}

TensorVal TensorVal::Reshaped(std::vector<int64_t> shape, const Scalar &pad) const {
  auto n = ShapeProduct(shape);
  if (HasNegativeExtent(shape) || !n || *n > kMaxDense || lazy_)
    return Filled(dtype_, std::move(shape), lazy_ ? fill_ : pad);
  std::vector<Scalar> data;
  data.reserve(static_cast<size_t>(*n));
  for (int64_t i = 0; i < *n; ++i)
    data.push_back(i < static_cast<int64_t>(data_.size()) ? data_[i] : pad);
  return Dense(dtype_, std::move(shape), std::move(data));
}

bool TensorVal::operator==(const TensorVal &o) const {
  return dtype_ == o.dtype_ && shape_ == o.shape_ && lazy_ == o.lazy_ &&
         data_ == o.data_ && fill_ == o.fill_ && overrides_ == o.overrides_;
}

std::string_view ExecModeName(ExecMode m) {
  return m == ExecMode::kEager ? "eager" : "graph";
}

std::optional<ExecMode> ExecModeFromName(std::string_view name) {
  if (name == "eager") return ExecMode::kEager;
  if (name == "graph") return ExecMode::kGraph;
  return std::nullopt;
}

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kGuided:
      return "guided";
    case Provenance::kRandom:
      return "random";
    case Provenance::kRepaired:
      return "repaired";
    case Provenance::kReused:
      return "reused";
  }
  return "?";
}

const ParamValue *TestInput::Find(const std::string &name) const {
  auto it = values.find(name);
  return it == values.end() ? nullptr : &it->second;
}

}  // namespace opfuzz
