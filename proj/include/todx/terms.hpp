#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "todx/error.hpp"

namespace todx {

using VarId = std::uint32_t;
using SymbolId = std::uint32_t;

/// Variables appearing inside query substitution images are numbered from
/// here on, so they never clash with the canonical variables of an equality.
inline constexpr VarId kQueryVarBase = 1u << 16;

struct Symbol {
  SymbolId id = 0;
  std::string name;
  unsigned arity = 0;
  std::int64_t weight = 1;
  std::int64_t precedence = 0;
};

/// Function symbols with KBO weights and a total precedence.
///
/// Weights must be >= 1, precedences pairwise distinct, and at least one
/// constant must exist. w0 is the smallest constant weight.
class Signature {
 public:
  SymbolId add(std::string name, unsigned arity, std::int64_t weight, std::int64_t precedence);

  /// Checks the global conditions (a constant exists). Called once the
  /// declarations are complete; add() checks the local ones.
  void validate() const;

  const Symbol& symbol(SymbolId id) const { return symbols_.at(id); }
  std::optional<SymbolId> find(std::string_view name) const;
  std::size_t size() const { return symbols_.size(); }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  std::int64_t weight(SymbolId id) const { return symbols_[id].weight; }
  /// f >> g
  bool greater_precedence(SymbolId f, SymbolId g) const {
    return symbols_[f].precedence > symbols_[g].precedence;
  }
  std::int64_t w0() const;

 private:
  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, SymbolId> by_name_;
};

/// Integer linear expression  c + sum a_i * x_i  with non-zero a_i only.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(std::int64_t constant) : constant_(constant) {}

  static LinearExpr variable(VarId v, std::int64_t coeff = 1) {
    LinearExpr e;
    e.add_var(v, coeff);
    return e;
  }

  std::int64_t constant() const { return constant_; }
  const std::vector<std::pair<VarId, std::int64_t>>& coefficients() const { return coeffs_; }
  std::int64_t coefficient(VarId v) const;

  void add_constant(std::int64_t c) { constant_ += c; }
  void add_var(VarId v, std::int64_t coeff);
  /// this += mult * other
  void add(const LinearExpr& other, std::int64_t mult = 1);

  LinearExpr operator-() const;
  friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) {
    a.add(b);
    return a;
  }
  friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) {
    a.add(b, -1);
    return a;
  }

  bool is_constant() const { return coeffs_.empty(); }
  bool is_zero() const { return coeffs_.empty() && constant_ == 0; }

  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;

  std::string to_string() const;

 private:
  std::int64_t constant_ = 0;
  // sorted by VarId
  std::vector<std::pair<VarId, std::int64_t>> coeffs_;
};

/// Outcome of a positivity check over all groundings.
enum class Sign3 : std::uint8_t { Positive, NonNegative, NotNonNegative };

const char* to_string(Sign3 s);

/// Positive iff e > 0 for every grounding with |x| >= w0, NonNegative iff
/// e >= 0 for all of them but not Positive, NotNonNegative otherwise.
Sign3 sign(const LinearExpr& e, std::int64_t w0);

class TermBank;

struct TermNode;

/// Handle to an interned term. Equality is identity, which coincides with
/// structural equality because every term lives in exactly one TermBank.
class Term {
 public:
  Term() = default;

  bool is_null() const { return node_ == nullptr; }
  explicit operator bool() const { return node_ != nullptr; }

  bool is_var() const;
  VarId var() const;
  SymbolId symbol() const;
  std::span<const Term> args() const;
  std::size_t arity() const { return args().size(); }
  Term arg(std::size_t i) const { return args()[i]; }
  bool ground() const;
  std::size_t hash() const;
  /// Number of symbol and variable occurrences.
  std::size_t size() const;
  std::size_t depth() const;

  const TermNode* node() const { return node_; }

  friend bool operator==(Term a, Term b) { return a.node_ == b.node_; }
  friend bool operator!=(Term a, Term b) { return a.node_ != b.node_; }
  /// Interning order; stable for one bank.
  std::uint32_t serial() const;

 private:
  friend class TermBank;
  explicit Term(const TermNode* n) : node_(n) {}
  const TermNode* node_ = nullptr;
};

struct TermNode {
  bool is_var = false;
  VarId var = 0;
  SymbolId symbol = 0;
  std::vector<Term> args;
  bool ground = true;
  std::size_t hash = 0;
  std::size_t size = 1;
  std::size_t depth = 0;
  std::uint32_t serial = 0;
  // KBO weight memo, filled lazily by the ordering (single writer).
  mutable std::unique_ptr<LinearExpr> weight_memo;
};

struct TermHash {
  std::size_t operator()(Term t) const { return t.hash(); }
};

/// Unparsed term tree, as read from a script.
struct RawTerm {
  std::string name;
  std::vector<RawTerm> args;

  friend bool operator==(const RawTerm&, const RawTerm&) = default;
  std::string to_string() const;
};

/// Maps variable names to VarIds in first-occurrence order, starting at base.
class VarNaming {
 public:
  explicit VarNaming(VarId base = 0) : base_(base) {}
  VarId get(const std::string& name);
  std::optional<VarId> find(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  VarId base() const { return base_; }

 private:
  VarId base_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> ids_;
};

/// Hash-consing arena for terms over one signature.
///
/// Not thread-safe for writers: interning (and weight memoization) must
/// happen from one thread at a time. Reading finished terms is safe.
class TermBank {
 public:
  explicit TermBank(std::shared_ptr<const Signature> sig);
  TermBank(const TermBank&) = delete;
  TermBank& operator=(const TermBank&) = delete;

  const Signature& signature() const { return *sig_; }
  std::shared_ptr<const Signature> signature_ptr() const { return sig_; }

  Term var(VarId v);
  Term app(SymbolId f, std::span<const Term> args);
  Term app(SymbolId f, std::initializer_list<Term> args) {
    return app(f, std::span<const Term>(args.begin(), args.size()));
  }
  Term constant(SymbolId c) { return app(c, std::span<const Term>{}); }
  Term app(std::string_view name, std::initializer_list<Term> args);

  /// Declared identifiers become symbols; undeclared identifiers without
  /// arguments become variables named through `vars`.
  Term intern(const RawTerm& raw, VarNaming& vars);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Key {
    bool is_var;
    VarId var;
    SymbolId symbol;
    std::vector<const TermNode*> args;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  Term insert(Key key, std::vector<Term> args);

  std::shared_ptr<const Signature> sig_;
  std::deque<TermNode> nodes_;
  std::unordered_map<Key, const TermNode*, KeyHash> table_;
};

/// Finite map from variables to terms; identity bindings are never stored.
class Substitution {
 public:
  Substitution() = default;

  void bind(VarId v, Term t);
  /// Image of v, or null when v is unbound.
  Term find(VarId v) const;
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::vector<std::pair<VarId, Term>>& bindings() const { return bindings_; }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  // sorted by VarId
  std::vector<std::pair<VarId, Term>> bindings_;
};

Term apply(TermBank& bank, Term t, const Substitution& subst);

/// Number of occurrences of a symbol or a variable in t.
std::size_t occurrences(Term t, SymbolId f);
std::size_t var_occurrences(Term t, VarId v);

/// |t| computed from scratch (no memoization).
LinearExpr weight(const Signature& sig, Term t);

/// sigma(e): each variable x replaced by |x sigma|.
LinearExpr subst_linear(const Signature& sig, const Substitution& subst, const LinearExpr& e);

void collect_vars(Term t, std::vector<VarId>& out);
bool contains_var(Term t, VarId v);
bool is_subterm(Term sub, Term t);

/// Renders variables as `x<id>` unless a name lookup is given.
std::string to_string(const Signature& sig, Term t,
                      const std::function<std::string(VarId)>& var_name = {});

}  // namespace todx
