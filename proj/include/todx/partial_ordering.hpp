#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "todx/ordering.hpp"
#include "todx/terms.hpp"

namespace todx {

/// What is known about a pair (a, b).
///   Nge: a !>= b    Nle: b !>= a    Inc: both
/// Gt implies Nle and Lt implies Nge, so those are absorbed.
enum class PoVal : std::uint8_t { Unknown, Gt, Lt, Eq, Nge, Nle, Inc };

const char* to_string(PoVal v);

/// The value seen from (b, a).
PoVal flip(PoVal v);

/// Least value entailing both, or nullopt if they contradict each other.
std::optional<PoVal> join(PoVal a, PoVal b);

/// s > t, s = t or s !>= t.
struct TermConstraint {
  Term lhs;
  Term rhs;
  Cmp3 rel;
};

/// Transitive closure of term constraints over a sequence of terms,
/// stored as a triangular array. Instances are immutable and owned by a
/// TpoStore, which shares structurally equal ones.
class PartialOrdering {
 public:
  std::size_t size() const { return elems_.size(); }
  const std::vector<Term>& elements() const { return elems_; }
  std::optional<std::size_t> index_of(Term t) const;

  PoVal get(std::size_t i, std::size_t j) const;
  /// Eq for identical terms, Unknown if either is not an element.
  PoVal get(Term a, Term b) const;

  bool implies(TermConstraint c) const;

  /// Re-derives every axiom instance; true if nothing new follows.
  bool is_closed() const;

  std::size_t hash() const { return hash_; }
  friend bool operator==(const PartialOrdering& a, const PartialOrdering& b) {
    return a.elems_ == b.elems_ && a.cells_ == b.cells_;
  }

 private:
  friend class TpoStore;

  static std::size_t cell(std::size_t i, std::size_t j) { return j * (j - 1) / 2 + i; }
  // Joins v into (i, j); queues the pair if it changed.
  void put(std::size_t i, std::size_t j, PoVal v, std::vector<std::pair<std::size_t, std::size_t>>& work);
  void close(std::vector<std::pair<std::size_t, std::size_t>>& work);
  PoVal derive(std::size_t x, std::size_t y, std::size_t z) const;
  void rehash();

  std::vector<Term> elems_;
  // cells_[cell(i, j)] for i < j, the value of (i, j)
  std::vector<PoVal> cells_;
  std::size_t hash_ = 0;
};

/// Owns and perfectly shares partial orderings; memoizes extensions.
/// Single-writer.
class TpoStore {
 public:
  explicit TpoStore(const Ordering& ord);
  TpoStore(const TpoStore&) = delete;
  TpoStore& operator=(const TpoStore&) = delete;

  const PartialOrdering* empty() const { return empty_; }

  /// Adds t as an element, together with the static pairs between t and
  /// the existing elements.
  const PartialOrdering* add_element(const PartialOrdering* po, Term t);
  const PartialOrdering* add_constraint(const PartialOrdering* po, TermConstraint c);
  /// Adds the elements of every constraint, then the constraints.
  const PartialOrdering* extend(const PartialOrdering* po, std::span<const TermConstraint> cs);

  std::size_t size() const { return owned_.size(); }

 private:
  const PartialOrdering* intern(PartialOrdering&& po);

  struct ElemKey {
    const PartialOrdering* po;
    const TermNode* t;
    friend bool operator==(const ElemKey&, const ElemKey&) = default;
  };
  struct ConsKey {
    const PartialOrdering* po;
    const TermNode* l;
    const TermNode* r;
    Cmp3 rel;
    friend bool operator==(const ConsKey&, const ConsKey&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const ElemKey& k) const;
    std::size_t operator()(const ConsKey& k) const;
  };

  const Ordering* ord_;
  std::vector<std::unique_ptr<PartialOrdering>> owned_;
  std::unordered_map<std::size_t, std::vector<const PartialOrdering*>> by_hash_;
  std::unordered_map<ElemKey, const PartialOrdering*, KeyHash> elem_memo_;
  std::unordered_map<ConsKey, const PartialOrdering*, KeyHash> cons_memo_;
  const PartialOrdering* empty_;
};

/// One term comparison node on a path and the edge taken out of it.
struct PathStep {
  Term lhs;
  Term rhs;
  Cmp3 label;
};

/// Constraints of the taken edges plus s > t for every pair of top-level
/// terms with s > t statically. `last` is the node under examination; it
/// contributes terms but no edge.
std::vector<TermConstraint> term_formula(const Ordering& ord, std::span<const PathStep> path,
                                         std::optional<std::pair<Term, Term>> last);

/// Label forced on a term comparison node s ? t, given the partial ordering
/// of the path up to and including the node's own terms.
std::optional<Cmp3> force_term(const PartialOrdering& po, Term s, Term t);

/// Label forced on a positivity check node e ? 0, from e alone.
std::optional<Sign3> force_positivity(const LinearExpr& e, std::int64_t w0);

}  // namespace todx
