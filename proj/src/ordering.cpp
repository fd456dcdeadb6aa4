#include "todx/ordering.hpp"

namespace todx {

const char* to_string(Cmp3 c) {
  switch (c) {
    case Cmp3::Greater: return ">";
    case Cmp3::Equal: return "=";
    case Cmp3::NotGreaterEqual: return "!>=";
  }
  return "?";
}

const char* to_string(OrderKind k) { return k == OrderKind::KBO ? "kbo" : "lpo"; }

namespace {

// Replaces a bound variable by its image; ground terms drop their substitution.
ClosureTerm deref(ClosureTerm s) {
  if (s.identity()) {
    return {s.term, nullptr};
  }
  if (s.term.ground()) {
    return {s.term, nullptr};
  }
  if (s.term.is_var()) {
    auto img = s.subst->find(s.term.var());
    return {img ? img : s.term, nullptr};
  }
  return s;
}

}  // namespace

bool closure_equal(ClosureTerm s, ClosureTerm t) {
  if ((s.identity() && t.identity()) || (s.term.ground() && t.term.ground())) {
    return s.term == t.term;
  }
  if (!s.identity() && s.term.is_var()) {
    return closure_equal(deref(s), t);
  }
  if (!t.identity() && t.term.is_var()) {
    return closure_equal(s, deref(t));
  }
  if (s.term.is_var() || t.term.is_var() || s.term.symbol() != t.term.symbol()) {
    return false;
  }
  for (std::size_t i = 0; i < s.term.arity(); ++i) {
    if (!closure_equal({s.term.arg(i), s.subst}, {t.term.arg(i), t.subst})) {
      return false;
    }
  }
  return true;
}

// Plain comparison on terms

Cmp3 Ordering::compare(Term s, Term t) const { return kind_ == OrderKind::KBO ? kbo(s, t) : lpo(s, t); }

Cmp3 Ordering::kbo(Term s, Term t) const {
  if (s == t) {
    return Cmp3::Equal;
  }
  LinearExpr e;
  if (memo_) {
    e = memo_weight(s) - memo_weight(t);
  } else {
    e = weight(*sig_, s) - weight(*sig_, t);
  }
  auto sg = sign(e, sig_->w0());
  if (sg == Sign3::Positive) {
    return Cmp3::Greater;
  }
  if (sg == Sign3::NotNonNegative || s.is_var() || t.is_var()) {
    return Cmp3::NotGreaterEqual;
  }
  if (s.symbol() != t.symbol()) {
    return sig_->greater_precedence(s.symbol(), t.symbol()) ? Cmp3::Greater : Cmp3::NotGreaterEqual;
  }
  for (std::size_t i = 0; i < s.arity(); ++i) {
    if (s.arg(i) != t.arg(i)) {
      return kbo(s.arg(i), t.arg(i)) == Cmp3::Greater ? Cmp3::Greater : Cmp3::NotGreaterEqual;
    }
  }
  return Cmp3::Equal;
}

Cmp3 Ordering::lpo(Term s, Term t) const {
  if (s == t) {
    return Cmp3::Equal;
  }
  return lpo_greater(s, t) ? Cmp3::Greater : Cmp3::NotGreaterEqual;
}

bool Ordering::lpo_greater(Term s, Term t) const {
  if (s.is_var()) {
    return false;
  }
  if (!t.is_var()) {
    auto f = s.symbol();
    auto g = t.symbol();
    if (f == g) {
      for (std::size_t i = 0; i < s.arity(); ++i) {
        if (s.arg(i) == t.arg(i)) {
          continue;
        }
        if (lpo_greater(s.arg(i), t.arg(i))) {
          bool all = true;
          for (std::size_t k = i + 1; k < t.arity() && all; ++k) {
            all = lpo_greater(s, t.arg(k));
          }
          if (all) {
            return true;
          }
        }
        break;
      }
    } else if (sig_->greater_precedence(f, g)) {
      bool all = true;
      for (std::size_t k = 0; k < t.arity() && all; ++k) {
        all = lpo_greater(s, t.arg(k));
      }
      if (all) {
        return true;
      }
    }
  }
  for (auto a : s.args()) {
    if (a == t || lpo_greater(a, t)) {
      return true;
    }
  }
  return false;
}

// Closure terms, case by case

LinearExpr Ordering::closure_weight(ClosureTerm s) const {
  LinearExpr e;
  add_closure_weight(s, e, 1, false);
  return e;
}

void Ordering::add_closure_weight(ClosureTerm s, LinearExpr& acc, std::int64_t mult, bool use_memo) const {
  if (s.identity() || s.term.ground()) {
    if (use_memo) {
      acc.add(memo_weight(s.term), mult);
    } else {
      acc.add(weight(*sig_, s.term), mult);
    }
    return;
  }
  if (s.term.is_var()) {
    auto img = s.subst->find(s.term.var());
    add_closure_weight({img ? img : s.term, nullptr}, acc, mult, use_memo);
    return;
  }
  acc.add_constant(mult * sig_->weight(s.term.symbol()));
  for (auto a : s.term.args()) {
    add_closure_weight({a, s.subst}, acc, mult, use_memo);
  }
}

const LinearExpr& Ordering::memo_weight(Term t) const {
  auto* node = t.node();
  if (!node->weight_memo) {
    LinearExpr e;
    if (t.is_var()) {
      e.add_var(t.var(), 1);
    } else {
      e.add_constant(sig_->weight(t.symbol()));
      for (auto a : t.args()) {
        e.add(memo_weight(a));
      }
    }
    node->weight_memo = std::make_unique<LinearExpr>(std::move(e));
  }
  return *node->weight_memo;
}

Cmp3 Ordering::compare_closure(ClosureTerm s, ClosureTerm t) const {
  bool gt = kind_ == OrderKind::KBO ? kbo_closure_greater(s, t) : lpo_closure_greater(s, t);
  if (gt) {
    return Cmp3::Greater;
  }
  return closure_equal(s, t) ? Cmp3::Equal : Cmp3::NotGreaterEqual;
}

bool Ordering::kbo_closure_greater(ClosureTerm s, ClosureTerm t) const {
  if ((s.identity() && t.identity()) || (s.term.ground() && t.term.ground())) {
    return kbo(s.term, t.term) == Cmp3::Greater;
  }
  if (!s.identity() && s.term.is_var()) {
    return kbo_closure_greater(deref(s), t);
  }
  if (!t.identity() && t.term.is_var()) {
    return kbo_closure_greater(s, deref(t));
  }
  auto e = closure_weight(s) - closure_weight(t);
  auto sg = sign(e, sig_->w0());
  if (sg == Sign3::Positive) {
    return true;
  }
  if (sg == Sign3::NotNonNegative || s.term.is_var() || t.term.is_var()) {
    return false;
  }
  auto f = s.term.symbol();
  auto g = t.term.symbol();
  if (f != g) {
    return sig_->greater_precedence(f, g);
  }
  for (std::size_t i = 0; i < s.term.arity(); ++i) {
    ClosureTerm si{s.term.arg(i), s.subst};
    ClosureTerm ti{t.term.arg(i), t.subst};
    if (!closure_equal(si, ti)) {
      return kbo_closure_greater(si, ti);
    }
  }
  return false;
}

bool Ordering::lpo_closure_greater(ClosureTerm s, ClosureTerm t) const {
  if ((s.identity() && t.identity()) || (s.term.ground() && t.term.ground())) {
    return lpo(s.term, t.term) == Cmp3::Greater;
  }
  if (!s.identity() && s.term.is_var()) {
    return lpo_closure_greater(deref(s), t);
  }
  if (!t.identity() && t.term.is_var()) {
    return lpo_closure_greater(s, deref(t));
  }
  if (s.term.is_var()) {
    return false;
  }
  if (!t.term.is_var()) {
    auto f = s.term.symbol();
    auto g = t.term.symbol();
    if (f == g) {
      for (std::size_t i = 0; i < s.term.arity(); ++i) {
        ClosureTerm si{s.term.arg(i), s.subst};
        ClosureTerm ti{t.term.arg(i), t.subst};
        if (closure_equal(si, ti)) {
          continue;
        }
        if (lpo_closure_greater(si, ti)) {
          bool all = true;
          for (std::size_t k = i + 1; k < t.term.arity() && all; ++k) {
            all = lpo_closure_greater(s, {t.term.arg(k), t.subst});
          }
          if (all) {
            return true;
          }
        }
        break;
      }
    } else if (sig_->greater_precedence(f, g)) {
      bool all = true;
      for (std::size_t k = 0; k < t.term.arity() && all; ++k) {
        all = lpo_closure_greater(s, {t.term.arg(k), t.subst});
      }
      if (all) {
        return true;
      }
    }
  }
  for (auto a : s.term.args()) {
    ClosureTerm si{a, s.subst};
    if (closure_equal(si, t) || lpo_closure_greater(si, t)) {
      return true;
    }
  }
  return false;
}

// Unidirectional, fail-fast

Cmp3 Ordering::compare_unidirectional(ClosureTerm s, ClosureTerm t) const {
  return kind_ == OrderKind::KBO ? kbo_uni(s, t) : lpo_uni(s, t);
}

Cmp3 Ordering::kbo_uni(ClosureTerm s, ClosureTerm t) const {
  ++steps_;
  s = s.term.is_var() || s.term.ground() ? deref(s) : s;
  t = t.term.is_var() || t.term.ground() ? deref(t) : t;
  if (s.identity() && t.identity() && s.term == t.term) {
    return Cmp3::Equal;
  }
  LinearExpr e;
  add_closure_weight(s, e, 1, memo_);
  add_closure_weight(t, e, -1, memo_);
  auto sg = sign(e, sig_->w0());
  if (sg == Sign3::Positive) {
    return Cmp3::Greater;
  }
  // After dereferencing, a variable side carries no substitution while a
  // non-identity side is an application, so they cannot be equal.
  if (sg == Sign3::NotNonNegative || s.term.is_var() || t.term.is_var()) {
    return Cmp3::NotGreaterEqual;
  }
  auto f = s.term.symbol();
  auto g = t.term.symbol();
  if (f != g) {
    return sig_->greater_precedence(f, g) ? Cmp3::Greater : Cmp3::NotGreaterEqual;
  }
  for (std::size_t i = 0; i < s.term.arity(); ++i) {
    auto r = kbo_uni({s.term.arg(i), s.subst}, {t.term.arg(i), t.subst});
    if (r != Cmp3::Equal) {
      return r;
    }
  }
  return Cmp3::Equal;
}

bool Ordering::occurs_in(VarId v, ClosureTerm s) const {
  s = deref(s);
  if (s.identity()) {
    return contains_var(s.term, v);
  }
  for (auto a : s.term.args()) {
    if (occurs_in(v, {a, s.subst})) {
      return true;
    }
  }
  return false;
}

bool Ordering::lpo_uni_geq(ClosureTerm s, ClosureTerm t) const { return lpo_uni(s, t) != Cmp3::NotGreaterEqual; }

Cmp3 Ordering::lpo_uni(ClosureTerm s, ClosureTerm t) const {
  ++steps_;
  s = s.term.is_var() || s.term.ground() ? deref(s) : s;
  t = t.term.is_var() || t.term.ground() ? deref(t) : t;
  if (s.identity() && t.identity() && s.term == t.term) {
    return Cmp3::Equal;
  }
  if (s.term.is_var()) {
    return Cmp3::NotGreaterEqual;
  }
  if (t.term.is_var()) {
    return occurs_in(t.term.var(), s) ? Cmp3::Greater : Cmp3::NotGreaterEqual;
  }
  auto f = s.term.symbol();
  auto g = t.term.symbol();
  if (f == g) {
    for (std::size_t i = 0; i < s.term.arity(); ++i) {
      auto r = lpo_uni({s.term.arg(i), s.subst}, {t.term.arg(i), t.subst});
      if (r == Cmp3::Equal) {
        continue;
      }
      if (r == Cmp3::Greater) {
        for (std::size_t k = i + 1; k < t.term.arity(); ++k) {
          if (lpo_uni(s, {t.term.arg(k), t.subst}) != Cmp3::Greater) {
            return Cmp3::NotGreaterEqual;
          }
        }
        return Cmp3::Greater;
      }
      for (std::size_t j = i + 1; j < s.term.arity(); ++j) {
        if (lpo_uni_geq({s.term.arg(j), s.subst}, t)) {
          return Cmp3::Greater;
        }
      }
      return Cmp3::NotGreaterEqual;
    }
    return Cmp3::Equal;
  }
  if (sig_->greater_precedence(f, g)) {
    for (auto b : t.term.args()) {
      if (lpo_uni(s, {b, t.subst}) != Cmp3::Greater) {
        return Cmp3::NotGreaterEqual;
      }
    }
    return Cmp3::Greater;
  }
  for (auto a : s.term.args()) {
    if (lpo_uni_geq({a, s.subst}, t)) {
      return Cmp3::Greater;
    }
  }
  return Cmp3::NotGreaterEqual;
}

}  // namespace todx
