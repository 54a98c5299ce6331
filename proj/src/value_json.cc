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

#include "opfuzz/value_json.h"

namespace opfuzz {

using nlohmann::json;

namespace {

// Tensor elements carry no tag; their kind follows the dtype.
json ElementToJson(const Scalar &s) {
  return std::visit([](const auto &v) -> json { return v; }, s);
}

Scalar ElementFromJson(const json &j, DType dtype) {
  switch (ElemKindOf(dtype)) {
    case ElemKind::kFloat: return j.get<double>();
    case ElemKind::kString: return j.get<std::string>();
    default: return j.get<int64_t>();
  }
}

}  // namespace

json ScalarToJson(const Scalar &s) {
  if (const auto *i = std::get_if<int64_t>(&s)) return json{{"i64", *i}};
  if (const auto *d = std::get_if<double>(&s)) return json{{"f64", *d}};
  return json{{"str", std::get<std::string>(s)}};
}

Scalar ScalarFromJson(const json &j) {
  if (j.contains("i64")) return j.at("i64").get<int64_t>();
  if (j.contains("f64")) return j.at("f64").get<double>();
  if (j.contains("str")) return j.at("str").get<std::string>();
  throw Error("scalar JSON needs one of i64, f64, str: " + j.dump());
}

json ParamValueToJson(const ParamValue &v) {
  if (const auto *s = std::get_if<Scalar>(&v)) return ScalarToJson(*s);
  if (const auto *h = std::get_if<HandleRef>(&v)) return json{{"handle", h->id}};
  const auto &t = std::get<TensorVal>(v);
  json j;
  j["dtype"] = std::string(DTypeName(t.dtype()));
  j["shape"] = t.shape();
  if (t.lazy()) {
    j["fill"] = ElementToJson(t.fill());
    // Stored elements of a lazy tensor, as [flat, value] pairs.
    json stored = json::array();
    for (const auto &[flat, e] : t.overrides()) stored.push_back(json::array({flat, ElementToJson(e)}));
    if (!stored.empty()) j["stored"] = stored;
  } else {
    json data = json::array();
    for (const auto &e : t.data()) data.push_back(ElementToJson(e));
    j["data"] = data;
  }
  return j;
}

ParamValue ParamValueFromJson(const json &j) {
  if (j.contains("handle")) return HandleRef{j.at("handle").get<int64_t>()};
  if (!j.contains("dtype")) return ScalarFromJson(j);
  auto dtype = DTypeFromName(j.at("dtype").get<std::string>());
  if (!dtype || !IsTensorDType(*dtype)) throw Error("bad tensor dtype in JSON: " + j.dump());
  auto shape = j.at("shape").get<std::vector<int64_t>>();
  if (j.contains("fill")) {
    TensorVal t = TensorVal::Filled(*dtype, shape, ElementFromJson(j.at("fill"), *dtype));
    if (j.contains("stored"))
      for (const auto &p : j.at("stored")) t.Set(p.at(0).get<int64_t>(), ElementFromJson(p.at(1), *dtype));
    return t;
  }
  std::vector<Scalar> data;
  for (const auto &e : j.at("data")) data.push_back(ElementFromJson(e, *dtype));
  return TensorVal::Dense(*dtype, shape, std::move(data));
}

json TestInputToJson(const TestInput &in) {
  json values = json::object();
  for (const auto &[name, v] : in.values) values[name] = ParamValueToJson(v);
  return json{{"mode", std::string(ExecModeName(in.mode))},
              {"provenance", std::string(ProvenanceName(in.provenance))},
              {"values", values}};
}

TestInput TestInputFromJson(const json &j) {
  TestInput in;
  if (j.contains("mode")) {
    auto m = ExecModeFromName(j.at("mode").get<std::string>());
    if (!m) throw Error("unknown mode in JSON: " + j.at("mode").dump());
    in.mode = *m;
  }
  if (j.contains("provenance")) {
    std::string p = j.at("provenance").get<std::string>();
    for (Provenance v : {Provenance::kGuided, Provenance::kRandom, Provenance::kRepaired, Provenance::kReused})
      if (ProvenanceName(v) == p) in.provenance = v;
  }
  for (const auto &[name, v] : j.at("values").items()) in.values[name] = ParamValueFromJson(v);
  return in;
}

}  // namespace opfuzz
