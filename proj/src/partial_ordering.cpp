#include "todx/partial_ordering.hpp"

#include <algorithm>
#include <string>

namespace todx {

const char* to_string(PoVal v) {
  switch (v) {
    case PoVal::Unknown: return "?";
    case PoVal::Gt: return ">";
    case PoVal::Lt: return "<";
    case PoVal::Eq: return "=";
    case PoVal::Nge: return "!>=";
    case PoVal::Nle: return "!<=";
    case PoVal::Inc: return "<>";
  }
  return "?";
}

PoVal flip(PoVal v) {
  switch (v) {
    case PoVal::Gt: return PoVal::Lt;
    case PoVal::Lt: return PoVal::Gt;
    case PoVal::Nge: return PoVal::Nle;
    case PoVal::Nle: return PoVal::Nge;
    default: return v;
  }
}

namespace {

enum : unsigned { kGt = 1, kLt = 2, kEq = 4, kNge = 8, kNle = 16 };

unsigned bits(PoVal v) {
  switch (v) {
    case PoVal::Unknown: return 0;
    case PoVal::Gt: return kGt | kNle;
    case PoVal::Lt: return kLt | kNge;
    case PoVal::Eq: return kEq;
    case PoVal::Nge: return kNge;
    case PoVal::Nle: return kNle;
    case PoVal::Inc: return kNge | kNle;
  }
  return 0;
}

bool is_lt(PoVal v) { return v == PoVal::Lt; }
bool is_le(PoVal v) { return v == PoVal::Lt || v == PoVal::Eq; }
bool is_eq(PoVal v) { return v == PoVal::Eq; }
bool is_nge(PoVal v) { return v == PoVal::Nge || v == PoVal::Inc || v == PoVal::Lt; }

PoVal from_constraint(Cmp3 rel) {
  switch (rel) {
    case Cmp3::Greater: return PoVal::Gt;
    case Cmp3::Equal: return PoVal::Eq;
    case Cmp3::NotGreaterEqual: return PoVal::Nge;
  }
  return PoVal::Unknown;
}

[[noreturn]] void conflict(const char* what) { throw Error(ErrorKind::Internal, std::string("partial ordering: ") + what); }

}  // namespace

std::optional<PoVal> join(PoVal a, PoVal b) {
  unsigned m = bits(a) | bits(b);
  if ((m & (kGt | kEq)) && (m & kNge)) {
    return std::nullopt;
  }
  if ((m & (kLt | kEq)) && (m & kNle)) {
    return std::nullopt;
  }
  if (m & kGt) return PoVal::Gt;
  if (m & kLt) return PoVal::Lt;
  if (m & kEq) return PoVal::Eq;
  if ((m & kNge) && (m & kNle)) return PoVal::Inc;
  if (m & kNge) return PoVal::Nge;
  if (m & kNle) return PoVal::Nle;
  return PoVal::Unknown;
}

std::optional<std::size_t> PartialOrdering::index_of(Term t) const {
  auto it = std::find(elems_.begin(), elems_.end(), t);
  if (it == elems_.end()) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - elems_.begin());
}

PoVal PartialOrdering::get(std::size_t i, std::size_t j) const {
  if (i == j) {
    return PoVal::Eq;
  }
  return i < j ? cells_[cell(i, j)] : flip(cells_[cell(j, i)]);
}

PoVal PartialOrdering::get(Term a, Term b) const {
  if (a == b) {
    return PoVal::Eq;
  }
  auto i = index_of(a);
  auto j = index_of(b);
  if (!i || !j) {
    return PoVal::Unknown;
  }
  return get(*i, *j);
}

bool PartialOrdering::implies(TermConstraint c) const {
  auto v = get(c.lhs, c.rhs);
  switch (c.rel) {
    case Cmp3::Greater: return v == PoVal::Gt;
    case Cmp3::Equal: return v == PoVal::Eq;
    case Cmp3::NotGreaterEqual: return is_nge(v);
  }
  return false;
}

void PartialOrdering::put(std::size_t i, std::size_t j, PoVal v,
                          std::vector<std::pair<std::size_t, std::size_t>>& work) {
  if (i == j) {
    if (v != PoVal::Eq && v != PoVal::Unknown) {
      conflict("element related strictly to itself");
    }
    return;
  }
  if (i > j) {
    std::swap(i, j);
    v = flip(v);
  }
  auto& c = cells_[cell(i, j)];
  auto r = join(c, v);
  if (!r) {
    conflict("contradictory constraints");
  }
  if (*r != c) {
    c = *r;
    work.emplace_back(i, j);
  }
}

// Conclusion of tr1-tr5 on the premises (x, y) and (y, z), about (x, z).
PoVal PartialOrdering::derive(std::size_t x, std::size_t y, std::size_t z) const {
  auto v1 = get(x, y);
  auto v2 = get(y, z);
  if (is_eq(v1) && is_eq(v2)) {
    return PoVal::Eq;
  }
  if ((is_le(v1) && is_lt(v2)) || (is_lt(v1) && is_le(v2))) {
    return PoVal::Lt;
  }
  if ((is_nge(v1) && is_le(v2)) || (is_le(v1) && is_nge(v2))) {
    return PoVal::Nge;
  }
  return PoVal::Unknown;
}

void PartialOrdering::close(std::vector<std::pair<std::size_t, std::size_t>>& work) {
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    for (std::size_t c = 0; c < elems_.size(); ++c) {
      if (c == a || c == b) {
        continue;
      }
      put(a, c, derive(a, b, c), work);
      put(b, c, derive(b, a, c), work);
      put(c, b, derive(c, a, b), work);
      put(c, a, derive(c, b, a), work);
    }
  }
  rehash();
}

bool PartialOrdering::is_closed() const {
  std::size_t n = elems_.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (x == y || y == z || x == z) {
          continue;
        }
        auto cur = get(x, z);
        auto r = join(cur, derive(x, y, z));
        if (!r || *r != cur) {
          return false;
        }
      }
    }
  }
  return true;
}

void PartialOrdering::rehash() {
  std::size_t h = elems_.size();
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (auto t : elems_) {
    mix(t.serial());
  }
  for (auto c : cells_) {
    mix(static_cast<std::size_t>(c));
  }
  hash_ = h;
}

std::size_t TpoStore::KeyHash::operator()(const ElemKey& k) const {
  return std::hash<const void*>()(k.po) * 31 + std::hash<const void*>()(k.t);
}

std::size_t TpoStore::KeyHash::operator()(const ConsKey& k) const {
  std::size_t h = std::hash<const void*>()(k.po);
  h = h * 31 + std::hash<const void*>()(k.l);
  h = h * 31 + std::hash<const void*>()(k.r);
  return h * 4 + static_cast<std::size_t>(k.rel);
}

TpoStore::TpoStore(const Ordering& ord) : ord_(&ord) {
  PartialOrdering po;
  po.rehash();
  empty_ = intern(std::move(po));
}

const PartialOrdering* TpoStore::intern(PartialOrdering&& po) {
  auto& bucket = by_hash_[po.hash()];
  for (auto* p : bucket) {
    if (*p == po) {
      return p;
    }
  }
  owned_.push_back(std::make_unique<PartialOrdering>(std::move(po)));
  bucket.push_back(owned_.back().get());
  return owned_.back().get();
}

const PartialOrdering* TpoStore::add_element(const PartialOrdering* po, Term t) {
  if (po->index_of(t)) {
    return po;
  }
  ElemKey key{po, t.node()};
  if (auto it = elem_memo_.find(key); it != elem_memo_.end()) {
    return it->second;
  }
  PartialOrdering next = *po;
  std::size_t n = next.elems_.size();
  next.elems_.push_back(t);
  next.cells_.resize(next.cells_.size() + n, PoVal::Unknown);
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < n; ++i) {
    auto u = next.elems_[i];
    if (ord_->compare(t, u) == Cmp3::Greater) {
      next.put(n, i, PoVal::Gt, work);
    } else if (ord_->compare(u, t) == Cmp3::Greater) {
      next.put(i, n, PoVal::Gt, work);
    }
  }
  next.close(work);
  auto* res = intern(std::move(next));
  elem_memo_.emplace(key, res);
  return res;
}

const PartialOrdering* TpoStore::add_constraint(const PartialOrdering* po, TermConstraint c) {
  po = add_element(po, c.lhs);
  po = add_element(po, c.rhs);
  if (po->implies(c)) {
    return po;
  }
  ConsKey key{po, c.lhs.node(), c.rhs.node(), c.rel};
  if (auto it = cons_memo_.find(key); it != cons_memo_.end()) {
    return it->second;
  }
  PartialOrdering next = *po;
  std::vector<std::pair<std::size_t, std::size_t>> work;
  next.put(*next.index_of(c.lhs), *next.index_of(c.rhs), from_constraint(c.rel), work);
  next.close(work);
  auto* res = intern(std::move(next));
  cons_memo_.emplace(key, res);
  return res;
}

const PartialOrdering* TpoStore::extend(const PartialOrdering* po, std::span<const TermConstraint> cs) {
  for (const auto& c : cs) {
    po = add_element(po, c.lhs);
    po = add_element(po, c.rhs);
  }
  for (const auto& c : cs) {
    po = add_constraint(po, c);
  }
  return po;
}

std::vector<TermConstraint> term_formula(const Ordering& ord, std::span<const PathStep> path,
                                         std::optional<std::pair<Term, Term>> last) {
  std::vector<TermConstraint> out;
  std::vector<Term> tops;
  auto note = [&tops](Term t) {
    if (std::find(tops.begin(), tops.end(), t) == tops.end()) {
      tops.push_back(t);
    }
  };
  for (const auto& st : path) {
    out.push_back({st.lhs, st.rhs, st.label});
    note(st.lhs);
    note(st.rhs);
  }
  if (last) {
    note(last->first);
    note(last->second);
  }
  for (auto s : tops) {
    for (auto t : tops) {
      if (s != t && ord.compare(s, t) == Cmp3::Greater) {
        out.push_back({s, t, Cmp3::Greater});
      }
    }
  }
  return out;
}

std::optional<Cmp3> force_term(const PartialOrdering& po, Term s, Term t) {
  auto v = po.get(s, t);
  if (v == PoVal::Gt) {
    return Cmp3::Greater;
  }
  if (v == PoVal::Eq) {
    return Cmp3::Equal;
  }
  if (is_nge(v)) {
    return Cmp3::NotGreaterEqual;
  }
  return std::nullopt;
}

std::optional<Sign3> force_positivity(const LinearExpr& e, std::int64_t w0) {
  if (sign(e, w0) == Sign3::Positive) {
    return Sign3::Positive;
  }
  if (e.is_zero()) {
    return Sign3::NonNegative;
  }
  if (sign(-e, w0) == Sign3::Positive) {
    return Sign3::NotNonNegative;
  }
  return std::nullopt;
}

}  // namespace todx
