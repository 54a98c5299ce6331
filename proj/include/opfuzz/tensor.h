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

#ifndef OPFUZZ_TENSOR_H_
#define OPFUZZ_TENSOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "opfuzz/dtype.h"

namespace opfuzz {

// Scalar payload of attrs and tensor elements. Booleans are stored as 0/1.
using Scalar = std::variant<int64_t, double, std::string>;

std::string ScalarToString(const Scalar &s);
bool IsNumeric(const Scalar &s);
// Scalar zero of the given element kind.
Scalar ZeroOf(ElemKind kind);

// Checked 64-bit arithmetic; nullopt on overflow.
std::optional<int64_t> CheckedAdd(int64_t a, int64_t b);
std::optional<int64_t> CheckedSub(int64_t a, int64_t b);
std::optional<int64_t> CheckedMul(int64_t a, int64_t b);

// Product of extents; nullopt when it does not fit in int64. Negative extents
// are legal here and simply produce a non-positive product.
std::optional<int64_t> ShapeProduct(std::span<const int64_t> shape);

// A tensor value. Small tensors are stored densely in row-major order.
// Oversized or uniform tensors use the lazy form: a fill value plus the
// logical shape, with sparse overrides for stored elements.
class TensorVal {
 public:
  // Reshapes past this element count fall back to the lazy form.
  static constexpr int64_t kMaxDense = 4096;

  TensorVal() = default;
  static TensorVal Dense(DType dtype, std::vector<int64_t> shape,
                         std::vector<Scalar> data);
  static TensorVal Filled(DType dtype, std::vector<int64_t> shape,
                          Scalar fill);
  static TensorVal ScalarTensor(DType dtype, Scalar v);

  DType dtype() const { return dtype_; }
  void set_dtype(DType t) { dtype_ = t; }
  const std::vector<int64_t> &shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  std::optional<int64_t> size() const { return ShapeProduct(shape_); }
  bool lazy() const { return lazy_; }
  const Scalar &fill() const { return fill_; }
  const std::vector<Scalar> &data() const { return data_; }
  // Lazy with no stored overrides: every element equals fill().
  bool uniform() const { return lazy_ && overrides_.empty(); }
  // Elements written into a lazy tensor, by flat offset.
  const std::map<int64_t, Scalar> &overrides() const { return overrides_; }
  // True when the tensor owns no element storage (size <= 0).
  bool empty() const;

  // Row-major flat offset; nullopt if any index is outside its extent or the
  // index count differs from the rank.
  std::optional<int64_t> FlatIndex(std::span<const int64_t> idx) const;
  // Element access by flat offset. Caller guarantees 0 <= flat < size.
  Scalar At(int64_t flat) const;
  void Set(int64_t flat, Scalar v);

  // Returns a copy reshaped to `shape`; element count is adjusted by
  // truncating or padding with `pad` (densely when small enough).
  TensorVal Reshaped(std::vector<int64_t> shape, const Scalar &pad) const;

  bool operator==(const TensorVal &o) const;

 private:
  DType dtype_ = DType::kDtInt64;
  std::vector<int64_t> shape_;
  bool lazy_ = false;
  std::vector<Scalar> data_;
  Scalar fill_ = int64_t{0};
  std::map<int64_t, Scalar> overrides_;
};

// Reference to an entry in the per-campaign resource handle table. Id 0 is
// the null handle.
struct HandleRef {
  int64_t id = 0;
  bool operator==(const HandleRef &) const = default;
};

using ParamValue = std::variant<Scalar, TensorVal, HandleRef>;

enum class ExecMode { kEager, kGraph };
std::string_view ExecModeName(ExecMode m);
std::optional<ExecMode> ExecModeFromName(std::string_view name);

enum class Provenance { kGuided, kRandom, kRepaired, kReused };
std::string_view ProvenanceName(Provenance p);

// Concrete binding of every declared parameter of one operator.
struct TestInput {
  std::map<std::string, ParamValue> values;
  ExecMode mode = ExecMode::kEager;
  Provenance provenance = Provenance::kGuided;

  const ParamValue *Find(const std::string &name) const;
  bool operator==(const TestInput &o) const {
    return values == o.values && mode == o.mode;
  }
};

}  // namespace opfuzz

#endif  // OPFUZZ_TENSOR_H_
