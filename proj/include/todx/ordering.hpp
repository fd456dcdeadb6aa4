#pragma once

#include <cstdint>

#include "todx/terms.hpp"

namespace todx {

/// Three-valued comparison result: s > t, s = t, or neither.
enum class Cmp3 : std::uint8_t { Greater, Equal, NotGreaterEqual };

const char* to_string(Cmp3 c);

enum class OrderKind : std::uint8_t { KBO, LPO };

const char* to_string(OrderKind k);

/// A term paired with a substitution, compared as if the substitution had
/// been applied. A null or empty substitution stands for the identity.
struct ClosureTerm {
  Term term;
  const Substitution* subst = nullptr;

  bool identity() const { return subst == nullptr || subst->empty(); }
};

bool closure_equal(ClosureTerm s, ClosureTerm t);

/// KBO or LPO over one signature.
///
/// Three routes compute the same relation:
///  - compare():                on materialized terms;
///  - compare_closure():        closure-term recursion written case by case
///                              after the closure definitions, no memoization;
///  - compare_unidirectional(): fail-fast closure comparison used by the
///                              index; KBO weights may be memoized in the
///                              shared term nodes.
/// They are kept separate so each can serve as an oracle for the others.
class Ordering {
 public:
  Ordering(const Signature& sig, OrderKind kind) : sig_(&sig), kind_(kind) {}

  OrderKind kind() const { return kind_; }
  const Signature& signature() const { return *sig_; }

  Cmp3 compare(Term s, Term t) const;
  Cmp3 compare_closure(ClosureTerm s, ClosureTerm t) const;
  Cmp3 compare_unidirectional(ClosureTerm s, ClosureTerm t) const;
  bool greater_unidirectional(ClosureTerm s, ClosureTerm t) const {
    return compare_unidirectional(s, t) == Cmp3::Greater;
  }

  /// |t|, memoized in the term node when memoization is on.
  LinearExpr weight_of(Term t) const { return memo_ ? memo_weight(t) : weight(*sig_, t); }

  /// |s.sigma|, from the closure weight definition.
  LinearExpr closure_weight(ClosureTerm s) const;

  void set_weight_memo(bool on) { memo_ = on; }
  bool weight_memo() const { return memo_; }

  /// Recursive steps taken by compare_unidirectional since construction.
  std::uint64_t steps() const { return steps_; }

 private:
  Cmp3 kbo(Term s, Term t) const;
  Cmp3 lpo(Term s, Term t) const;
  bool lpo_greater(Term s, Term t) const;

  bool kbo_closure_greater(ClosureTerm s, ClosureTerm t) const;
  bool lpo_closure_greater(ClosureTerm s, ClosureTerm t) const;

  Cmp3 kbo_uni(ClosureTerm s, ClosureTerm t) const;
  Cmp3 lpo_uni(ClosureTerm s, ClosureTerm t) const;
  bool lpo_uni_geq(ClosureTerm s, ClosureTerm t) const;
  bool occurs_in(VarId v, ClosureTerm s) const;

  const LinearExpr& memo_weight(Term t) const;
  void add_closure_weight(ClosureTerm s, LinearExpr& acc, std::int64_t mult, bool use_memo) const;

  const Signature* sig_;
  OrderKind kind_;
  bool memo_ = true;
  mutable std::uint64_t steps_ = 0;
};

inline Cmp3 kbo_compare(const Signature& sig, Term s, Term t) { return Ordering(sig, OrderKind::KBO).compare(s, t); }
inline Cmp3 lpo_compare(const Signature& sig, Term s, Term t) { return Ordering(sig, OrderKind::LPO).compare(s, t); }

}  // namespace todx
