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

#include "opfuzz/generator.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opfuzz/constraint_eval.h"

namespace opfuzz {

int64_t Rng::Range(int64_t lo, int64_t hi) {
  if (lo >= hi) return lo;
  uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo);
  uint64_t r = span == std::numeric_limits<uint64_t>::max() ? eng_() : eng_() % (span + 1);
  return static_cast<int64_t>(static_cast<uint64_t>(lo) + r);
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t z = seed ^ (a * 0x9e3779b97f4a7c15ull) ^ (b * 0xc2b2ae3d27d4eb4full);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

const std::vector<int64_t> &SpecialInts() {
  static const std::vector<int64_t> kS = {
      0, 1, -1, 2, 7, int64_t{1} << 20, 2147483647, 2147483649, -(int64_t{1} << 31)};
  return kS;
}

namespace {

constexpr int64_t kI64Min = std::numeric_limits<int64_t>::min();
constexpr int64_t kI64Max = std::numeric_limits<int64_t>::max();
constexpr int64_t kMaxRank = 4;
// Dense materialization limit for generated tensors; larger ones are lazy.
constexpr int64_t kDenseLimit = 4096;

const std::vector<double> &SpecialFloats() {
  static const std::vector<double> kF = {0.0, 1.0, -1.0, 2.0, 7.0, 0.5, 1048576.0, 2147483647.0};
  return kF;
}

const std::vector<std::string> &SpecialStrings() {
  static const std::vector<std::string> kStr = {"", "a", "some_scope/matrix",
                                                std::string(64, 'x')};
  return kStr;
}

// Resolved view of the facts on one subject.
struct Bounds {
  std::optional<Scalar> eq;
  int64_t lo = kI64Min, hi = kI64Max;
  double flo = -std::numeric_limits<double>::infinity();
  double fhi = std::numeric_limits<double>::infinity();
  std::vector<Scalar> ne;
  int64_t mult = 0;
};

std::optional<double> Num(const Scalar &s) {
  if (const auto *i = std::get_if<int64_t>(&s)) return static_cast<double>(*i);
  if (const auto *d = std::get_if<double>(&s)) return *d;
  return std::nullopt;
}

void Apply(Bounds &b, const Fact &f, const TestInput &partial) {
  std::optional<Scalar> v;
  try {
    v = EvalValue(f.rhs, partial);
  } catch (const Error &) {
    return;  // refers to something not generated yet
  }
  if (!v) return;
  if (f.multiple_of) {
    if (const auto *m = std::get_if<int64_t>(&*v); m && *m != 0 && *m != kI64Min) b.mult = std::abs(*m);
    return;
  }
  if (f.op == CmpOp::kEq) {
    b.eq = *v;
    return;
  }
  if (f.op == CmpOp::kNe) {
    b.ne.push_back(*v);
    return;
  }
  auto d = Num(*v);
  if (!d) return;
  const auto *iv = std::get_if<int64_t>(&*v);
  // Integer view of the bound; float bounds round inward.
  auto ceil_i = [&](double x) {
    if (iv) return *iv;
    return x >= 9.2e18 ? kI64Max : x <= -9.2e18 ? kI64Min : static_cast<int64_t>(std::ceil(x));
  };
  auto floor_i = [&](double x) {
    if (iv) return *iv;
    return x >= 9.2e18 ? kI64Max : x <= -9.2e18 ? kI64Min : static_cast<int64_t>(std::floor(x));
  };
  switch (f.op) {
    case CmpOp::kGt: {
      int64_t l = ceil_i(*d);
      if (iv || l == *d) l = l == kI64Max ? l : l + 1;
      b.lo = std::max(b.lo, l);
      b.flo = std::max(b.flo, std::nextafter(*d, std::numeric_limits<double>::infinity()));
      break;
    }
    case CmpOp::kGe:
      b.lo = std::max(b.lo, ceil_i(*d));
      b.flo = std::max(b.flo, *d);
      break;
    case CmpOp::kLt: {
      int64_t h = floor_i(*d);
      if (iv || h == *d) h = h == kI64Min ? h : h - 1;
      b.hi = std::min(b.hi, h);
      b.fhi = std::min(b.fhi, std::nextafter(*d, -std::numeric_limits<double>::infinity()));
      break;
    }
    case CmpOp::kLe:
      b.hi = std::min(b.hi, floor_i(*d));
      b.fhi = std::min(b.fhi, *d);
      break;
    default:
      break;
  }
}

bool Excluded(const Bounds &b, const Scalar &v) {
  return std::find(b.ne.begin(), b.ne.end(), v) != b.ne.end();
}

bool IntFits(const Bounds &b, int64_t v) {
  return v >= b.lo && v <= b.hi && !Excluded(b, Scalar{v}) && (b.mult == 0 || v % b.mult == 0);
}

// Special values first, then a uniform draw in range. `small` biases toward
// the cheap end of S, for extents and ranks.
int64_t DrawInt(const Bounds &b, Rng &rng, bool small) {
  if (b.eq) {
    if (const auto *i = std::get_if<int64_t>(&*b.eq)) return *i;
    if (const auto *d = std::get_if<double>(&*b.eq)) return static_cast<int64_t>(*d);
  }
  std::vector<int64_t> cands;
  for (int64_t s : SpecialInts())
    if (IntFits(b, s)) cands.push_back(s);
  for (int64_t edge : {b.lo, b.hi})
    if (edge != kI64Min && edge != kI64Max && IntFits(b, edge) &&
        std::find(cands.begin(), cands.end(), edge) == cands.end())
      cands.push_back(edge);
  if (b.mult) {
    for (int64_t k : {b.mult, 2 * b.mult})
      if (IntFits(b, k) && std::find(cands.begin(), cands.end(), k) == cands.end()) cands.push_back(k);
  }
  if (small && !cands.empty()) {
    std::vector<int64_t> cheap;
    for (int64_t c : cands)
      if (c >= -8 && c <= 8) cheap.push_back(c);
    if (!cheap.empty() && rng.Chance(0.85)) return rng.Pick(cheap);
  }
  if (!cands.empty()) return rng.Pick(cands);
  if (b.lo > b.hi) return b.lo;
  int64_t lo = b.lo, hi = b.hi;
  if (small) {
    lo = std::max<int64_t>(lo, -8);
    hi = std::max(lo, std::min<int64_t>(hi, lo + 8));
  }
  for (int attempt = 0; attempt < 8; ++attempt) {
    int64_t v = rng.Range(lo, hi);
    if (b.mult) v -= v % b.mult;
    if (IntFits(b, v)) return v;
  }
  return lo;
}

double DrawFloat(const Bounds &b, Rng &rng) {
  if (b.eq) {
    if (auto d = Num(*b.eq)) return *d;
  }
  std::vector<double> cands;
  for (double s : SpecialFloats())
    if (s >= b.flo && s <= b.fhi && !Excluded(b, Scalar{s})) cands.push_back(s);
  if (!cands.empty()) return rng.Pick(cands);
  double lo = std::max(b.flo, -1e6), hi = std::min(b.fhi, 1e6);
  if (lo > hi) return b.flo;
  double u = static_cast<double>(rng.Next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::string DrawString(const Bounds &b, Rng &rng) {
  if (b.eq) {
    if (const auto *s = std::get_if<std::string>(&*b.eq)) return *s;
  }
  std::vector<std::string> cands;
  for (const auto &s : SpecialStrings())
    if (!Excluded(b, Scalar{s})) cands.push_back(s);
  return cands.empty() ? "z" : rng.Pick(cands);
}

Scalar DrawElem(ElemKind kind, const Bounds &b, Rng &rng) {
  switch (kind) {
    case ElemKind::kFloat: return DrawFloat(b, rng);
    case ElemKind::kString: return DrawString(b, rng);
    case ElemKind::kBool: {
      Bounds bb = b;
      bb.lo = std::max<int64_t>(bb.lo, 0);
      bb.hi = std::min<int64_t>(bb.hi, 1);
      if (bb.eq) return DrawInt(bb, rng, false) != 0 ? int64_t{1} : int64_t{0};
      std::vector<int64_t> c;
      for (int64_t v : {int64_t{0}, int64_t{1}})
        if (IntFits(bb, v)) c.push_back(v);
      return c.empty() ? int64_t{0} : rng.Pick(c);
    }
    default: return DrawInt(b, rng, false);
  }
}

bool Matches(const Fact &f, Subject s, int64_t axis = -1) {
  if (f.subject != s) return false;
  if (s == Subject::kDim) return f.all || f.axis == axis;
  return true;
}

Bounds Collect(const std::vector<Fact> &facts, const TestInput &partial, Subject s,
               int64_t axis = -1) {
  Bounds b;
  for (const auto &f : facts)
    if (Matches(f, s, axis)) Apply(b, f, partial);
  return b;
}

ElemKind KindOf(DType d) { return ElemKindOf(d); }

TensorVal DrawTensor(const Slot &slot, const std::vector<Fact> &facts, TestInput &partial,
                     Rng &rng) {
  // dtype
  std::vector<DType> dtypes = slot.dtypes;
  Bounds db = Collect(facts, partial, Subject::kDType);
  if (db.eq) {
    if (const auto *s = std::get_if<std::string>(&*db.eq)) {
      auto d = DTypeFromName(*s);
      if (d && std::find(dtypes.begin(), dtypes.end(), *d) != dtypes.end()) dtypes = {*d};
    }
  }
  std::erase_if(dtypes, [&](DType d) { return Excluded(db, Scalar{std::string(DTypeName(d))}); });
  if (dtypes.empty()) dtypes = slot.dtypes;
  DType dtype = rng.Pick(dtypes);

  // rank
  Bounds rb = Collect(facts, partial, Subject::kNdim);
  rb.lo = std::max<int64_t>(rb.lo, 0);
  if (!rb.eq) rb.hi = std::min(rb.hi, std::max(rb.lo, kMaxRank));
  int64_t rank = std::clamp<int64_t>(DrawInt(rb, rng, true), 0, 8);

  // extents
  std::vector<int64_t> shape;
  std::vector<bool> fixed;
  for (int64_t k = 0; k < rank; ++k) {
    Bounds eb = Collect(facts, partial, Subject::kDim, k);
    eb.lo = std::max<int64_t>(eb.lo, eb.eq ? kI64Min : 0);
    fixed.push_back(eb.eq.has_value());
    shape.push_back(DrawInt(eb, rng, true));
  }

  // size
  Bounds sb = Collect(facts, partial, Subject::kSize);
  if (sb.eq) {
    if (const auto *n = std::get_if<int64_t>(&*sb.eq); n && *n >= 0) {
      if (rank == 0 && *n != 1 && !rb.eq) {
        rank = 1;
        shape = {*n};
        fixed = {false};
      } else {
        int64_t fixed_prod = 1;
        int free_axis = -1;
        for (int64_t k = 0; k < rank; ++k) {
          if (fixed[static_cast<size_t>(k)]) fixed_prod = CheckedMul(fixed_prod, shape[static_cast<size_t>(k)]).value_or(0);
          else if (free_axis < 0) free_axis = static_cast<int>(k);
        }
        if (free_axis >= 0 && fixed_prod > 0 && *n % fixed_prod == 0) {
          for (int64_t k = 0; k < rank; ++k)
            if (!fixed[static_cast<size_t>(k)]) shape[static_cast<size_t>(k)] = 1;
          shape[static_cast<size_t>(free_axis)] = *n / fixed_prod;
        }
      }
    }
  } else {
    auto n = ShapeProduct(shape);
    if (n && *n < sb.lo) {
      for (size_t k = 0; k < shape.size(); ++k)
        if (!fixed[k] && shape[k] <= 0) shape[k] = 1;
    }
    n = ShapeProduct(shape);
    if (!n || *n > sb.hi) {
      for (size_t k = 0; k < shape.size(); ++k)
        if (!fixed[k]) shape[k] = 1;
    }
  }

  // elements
  ElemKind kind = KindOf(dtype);
  Bounds vb;
  for (const auto &f : facts)
    if (f.subject == Subject::kVal && f.all) Apply(vb, f, partial);
  bool negative = std::any_of(shape.begin(), shape.end(), [](int64_t e) { return e < 0; });
  auto n = ShapeProduct(shape);
  TensorVal t;
  if (!negative && n && *n <= kDenseLimit) {
    std::vector<Scalar> data;
    bool uniform = rng.Chance(0.5);
    Scalar fill = DrawElem(kind, vb, rng);
    for (int64_t i = 0; i < *n; ++i) data.push_back(uniform ? fill : DrawElem(kind, vb, rng));
    t = TensorVal::Dense(dtype, shape, std::move(data));
  } else {
    t = TensorVal::Filled(dtype, shape, DrawElem(kind, vb, rng));
  }
  partial.values[slot.decl.name] = t;

  // Literal-index facts, lowest offset first, so later ones can read earlier
  // elements. Lazy tensors stay uniform.
  if (t.lazy()) return t;
  std::vector<std::pair<int64_t, std::vector<Fact>>> by_offset;
  for (const auto &f : facts) {
    if (f.subject != Subject::kVal || f.all) continue;
    auto flat = t.FlatIndex(f.index);
    if (!flat) continue;
    auto it = std::find_if(by_offset.begin(), by_offset.end(), [&](const auto &p) { return p.first == *flat; });
    if (it == by_offset.end()) by_offset.push_back({*flat, {f}});
    else it->second.push_back(f);
  }
  std::sort(by_offset.begin(), by_offset.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
  for (const auto &[flat, fs] : by_offset) {
    Bounds eb = vb;
    for (const auto &f : fs) Apply(eb, f, partial);
    auto &cur = std::get<TensorVal>(partial.values[slot.decl.name]);
    cur.Set(flat, DrawElem(kind, eb, rng));
  }
  return std::get<TensorVal>(partial.values[slot.decl.name]);
}

Scalar DrawAttr(const Slot &slot, const std::vector<Fact> &facts, const TestInput &partial, Rng &rng) {
  Bounds b = Collect(facts, partial, Subject::kAttr);
  switch (ElemKindOf(slot.decl.dtype)) {
    case ElemKind::kFloat: return DrawFloat(b, rng);
    case ElemKind::kString: return DrawString(b, rng);
    case ElemKind::kBool: return DrawElem(ElemKind::kBool, b, rng);
    default: return DrawInt(b, rng, false);
  }
}

}  // namespace

TestInput GenerateInput(const DataTemplate &t, const ControlTemplate &ctrl, uint64_t seed,
                        const std::map<std::string, ParamValue> &pinned) {
  Rng rng(seed);
  TestInput in;
  in.mode = ctrl.modes.empty() ? ExecMode::kEager : ctrl.modes.front();
  for (const auto &slot : t.slots) {
    const std::string &name = slot.decl.name;
    std::vector<Fact> facts = slot.facts;
    for (const auto &choice : slot.choices) {
      const auto &alt = choice[rng.Below(choice.size())];
      facts.insert(facts.end(), alt.begin(), alt.end());
    }
    if (auto it = pinned.find(name); it != pinned.end()) {
      in.values[name] = it->second;
      continue;
    }
    switch (slot.decl.container) {
      case Container::kResource:
        in.values[name] = HandleRef{0};
        break;
      case Container::kFilePath: {
        auto f = ctrl.file_fixtures.find(name);
        std::string path = f == ctrl.file_fixtures.end() ? "" : f->second;
        in.values[name] = TensorVal::ScalarTensor(DType::kDtString, path);
        break;
      }
      case Container::kScalar:
        in.values[name] = DrawAttr(slot, facts, in, rng);
        break;
      case Container::kTensor:
        DrawTensor(slot, facts, in, rng);
        break;
    }
  }
  bool ok = std::all_of(t.constraints.begin(), t.constraints.end(),
                        [&](const Constraint &c) { return Evaluate(c, in); });
  if (ok) {
    in.provenance = Provenance::kGuided;
    return in;
  }
  RepairResult r = RepairInput(in, t);
  r.input.provenance = r.fixpoint ? Provenance::kRepaired : Provenance::kRandom;
  return r.input;
}

TestInput GenerateRandom(const OpSpec &spec, uint64_t seed) {
  Rng rng(seed);
  TestInput in;
  in.provenance = Provenance::kRandom;
  auto rand_string = [&] {
    std::string s;
    int64_t len = rng.Range(0, 16);
    for (int64_t i = 0; i < len; ++i) s += static_cast<char>('a' + rng.Below(26));
    return s;
  };
  auto rand_elem = [&](ElemKind k) -> Scalar {
    switch (k) {
      case ElemKind::kFloat: return static_cast<double>(rng.Range(-(int64_t{1} << 31), int64_t{1} << 31)) / 4.0;
      case ElemKind::kString: return rand_string();
      case ElemKind::kBool: return static_cast<int64_t>(rng.Below(2));
      default: return rng.Range(kI64Min, kI64Max);
    }
  };
  for (const auto &p : spec.params) {
    DType dtype = rng.Pick(p.dtypes);
    switch (p.container) {
      case Container::kResource:
        in.values[p.name] = HandleRef{rng.Range(0, 8)};
        break;
      case Container::kScalar:
        in.values[p.name] = rand_elem(ElemKindOf(dtype));
        break;
      case Container::kFilePath:
      case Container::kTensor: {
        int64_t rank = rng.Range(0, 4);
        std::vector<int64_t> shape;
        for (int64_t k = 0; k < rank; ++k) shape.push_back(rng.Range(0, 8));
        int64_t n = *ShapeProduct(shape);
        std::vector<Scalar> data;
        for (int64_t i = 0; i < n; ++i) data.push_back(rand_elem(ElemKindOf(dtype)));
        in.values[p.name] = TensorVal::Dense(dtype, shape, std::move(data));
        break;
      }
    }
  }
  return in;
}

}  // namespace opfuzz
