#include "todx/index.hpp"

#include <algorithm>

namespace todx {

const char* to_string(IndexMode m) {
  switch (m) {
    case IndexMode::Off: return "off";
    case IndexMode::PerEquality: return "on";
    case IndexMode::SharedByLhs: return "shared";
  }
  return "?";
}

std::optional<IndexMode> parse_index_mode(std::string_view s) {
  if (s == "off") return IndexMode::Off;
  if (s == "on") return IndexMode::PerEquality;
  if (s == "shared") return IndexMode::SharedByLhs;
  return std::nullopt;
}

std::pair<Term, Term> canonicalize(TermBank& bank, Term l, Term r) {
  std::vector<VarId> vars;
  collect_vars(l, vars);
  collect_vars(r, vars);
  Substitution ren;
  for (VarId i = 0; i < vars.size(); ++i) {
    ren.bind(vars[i], bank.var(i));
  }
  return {apply(bank, l, ren), apply(bank, r, ren)};
}

PostOrderingIndex::PostOrderingIndex(TermBank& bank, OrderKind kind, IndexMode mode)
    : bank_(&bank), ord_(bank.signature(), kind), mode_(mode), store_(std::make_unique<TpoStore>(ord_)) {}

EqId PostOrderingIndex::insert(Term l, Term r) {
  auto [cl, cr] = canonicalize(*bank_, l, r);
  std::vector<VarId> lv;
  std::vector<VarId> rv;
  collect_vars(cl, lv);
  collect_vars(cr, rv);
  for (auto v : rv) {
    if (std::find(lv.begin(), lv.end(), v) == lv.end()) {
      throw Error(ErrorKind::MalformedEquality, "right-hand side has a variable the left-hand side lacks");
    }
  }
  auto git = groups_.find(cl);
  if (git != groups_.end()) {
    for (auto id : git->second.members) {
      const auto& e = eqs_[id];
      if (!e.deleted && e.rhs == cr) {
        throw Error(ErrorKind::DuplicateEquality, "equality already present");
      }
    }
  } else {
    git = groups_.emplace(cl, Group{}).first;
    keys_.push_back(cl);
    if (mode_ == IndexMode::SharedByLhs) {
      git->second.tod = std::make_unique<Tod>(ord_, *store_);
    }
  }
  auto id = static_cast<EqId>(eqs_.size());
  eqs_.push_back({id, cl, cr, false});
  eq_tods_.emplace_back();
  git->second.members.push_back(id);
  ++live_;
  if (mode_ == IndexMode::SharedByLhs) {
    git->second.tod->insert(id, cl, cr);
  } else if (mode_ == IndexMode::PerEquality) {
    eq_tods_[id] = std::make_unique<Tod>(ord_, *store_);
    eq_tods_[id]->insert(id, cl, cr);
  }
  return id;
}

void PostOrderingIndex::remove(EqId id) {
  if (id >= eqs_.size()) {
    throw Error(ErrorKind::UnknownId, "unknown equality " + std::to_string(id));
  }
  auto& e = eqs_[id];
  if (e.deleted) {
    return;
  }
  e.deleted = true;
  --live_;
  if (mode_ == IndexMode::SharedByLhs) {
    groups_.at(e.lhs).tod->mark_deleted(id);
  } else if (mode_ == IndexMode::PerEquality) {
    eq_tods_[id]->mark_deleted(id);
  }
}

const Equality& PostOrderingIndex::equality(EqId id) const { return eqs_.at(id); }

const std::vector<EqId>& PostOrderingIndex::group(Term lhs) const {
  static const std::vector<EqId> none;
  auto it = groups_.find(lhs);
  return it == groups_.end() ? none : it->second.members;
}

const Tod* PostOrderingIndex::group_tod(Term lhs) const {
  auto it = groups_.find(lhs);
  return it == groups_.end() ? nullptr : it->second.tod.get();
}

const Tod* PostOrderingIndex::equality_tod(EqId id) const { return id < eq_tods_.size() ? eq_tods_[id].get() : nullptr; }

void PostOrderingIndex::for_each_tod(const std::function<void(const Tod&)>& fn) const {
  for (auto key : keys_) {
    if (auto* t = group_tod(key)) {
      fn(*t);
    }
  }
  for (const auto& t : eq_tods_) {
    if (t) {
      fn(*t);
    }
  }
}

std::vector<EqId> PostOrderingIndex::query_off(const Group& g, const Substitution& sigma, Want want) {
  std::vector<EqId> out;
  for (auto id : g.members) {
    const auto& e = eqs_[id];
    if (e.deleted) {
      continue;
    }
    if (ord_.greater_unidirectional({e.lhs, &sigma}, {e.rhs, &sigma})) {
      out.push_back(id);
      ++off_answers_;
      if (want == Want::First) {
        return out;
      }
    }
  }
  ++off_answers_;
  return out;
}

std::vector<EqId> PostOrderingIndex::query(Term lhs, const Substitution& sigma, Want want) {
  auto it = groups_.find(lhs);
  if (it == groups_.end()) {
    return {};
  }
  ++queries_;
  auto& g = it->second;
  switch (mode_) {
    case IndexMode::Off:
      return query_off(g, sigma, want);
    case IndexMode::SharedByLhs:
      return g.tod->retrieve(sigma, want);
    case IndexMode::PerEquality: {
      std::vector<EqId> out;
      for (auto id : g.members) {
        if (eqs_[id].deleted) {
          continue;
        }
        auto r = eq_tods_[id]->retrieve(sigma, want);
        out.insert(out.end(), r.begin(), r.end());
        if (want == Want::First && !out.empty()) {
          break;
        }
      }
      return out;
    }
  }
  return {};
}

Stats PostOrderingIndex::stats() const {
  Stats s;
  s.queries = queries_;
  s.demodulators = live_;
  s.answers = off_answers_;
  for_each_tod([&s](const Tod& t) {
    ++s.tods;
    const auto& c = t.counters();
    for (int i = 0; i < 3; ++i) {
      s.created[i] += c.created[i];
      s.processed[i] += c.processed[i];
      s.traversed[i] += c.traversed[i];
    }
    s.answers += c.answers;
  });
  if (mode_ == IndexMode::Off) {
    s.naive_comparisons = ord_.steps();
  }
  return s;
}

}  // namespace todx
