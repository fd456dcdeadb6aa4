#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "todx/ordering.hpp"
#include "todx/partial_ordering.hpp"
#include "todx/terms.hpp"
#include "todx/tod.hpp"

namespace todx {

enum class IndexMode : std::uint8_t { Off, PerEquality, SharedByLhs };

const char* to_string(IndexMode m);
std::optional<IndexMode> parse_index_mode(std::string_view s);

struct Stats {
  std::uint64_t queries = 0;
  std::uint64_t answers = 0;
  std::uint64_t demodulators = 0;
  std::uint64_t tods = 0;
  std::array<std::uint64_t, 3> created{};
  std::array<std::uint64_t, 3> processed{};
  std::array<std::uint64_t, 3> traversed{};
  std::uint64_t naive_comparisons = 0;

  friend bool operator==(const Stats&, const Stats&) = default;
};

struct Equality {
  EqId id = 0;
  Term lhs;
  Term rhs;
  bool deleted = false;
};

/// Renames variables by first occurrence over l, then r, starting at 0.
std::pair<Term, Term> canonicalize(TermBank& bank, Term l, Term r);

/// Equalities grouped by their (canonical) left-hand side, answering which
/// of them become ordered under a substitution.
class PostOrderingIndex {
 public:
  PostOrderingIndex(TermBank& bank, OrderKind kind, IndexMode mode);
  PostOrderingIndex(const PostOrderingIndex&) = delete;
  PostOrderingIndex& operator=(const PostOrderingIndex&) = delete;

  IndexMode mode() const { return mode_; }
  const Ordering& ordering() const { return ord_; }
  Ordering& ordering() { return ord_; }
  TermBank& bank() { return *bank_; }

  /// Canonicalizes and inserts l = r. Throws on duplicates of a live
  /// equality and when r has variables that l lacks.
  EqId insert(Term l, Term r);
  void remove(EqId id);

  /// Empty for an unknown left-hand side. The key must be canonical.
  std::vector<EqId> query(Term lhs, const Substitution& sigma, Want want);

  const Equality& equality(EqId id) const;
  std::size_t size() const { return eqs_.size(); }
  /// Canonical left-hand sides in creation order.
  const std::vector<Term>& group_keys() const { return keys_; }
  const std::vector<EqId>& group(Term lhs) const;

  /// The shared TOD of a group, or the TOD of one equality.
  const Tod* group_tod(Term lhs) const;
  const Tod* equality_tod(EqId id) const;
  void for_each_tod(const std::function<void(const Tod&)>& fn) const;

  Stats stats() const;

 private:
  struct Group {
    std::vector<EqId> members;
    std::unique_ptr<Tod> tod;
  };

  std::vector<EqId> query_off(const Group& g, const Substitution& sigma, Want want);

  TermBank* bank_;
  Ordering ord_;
  IndexMode mode_;
  std::unique_ptr<TpoStore> store_;
  std::vector<Equality> eqs_;
  std::vector<std::unique_ptr<Tod>> eq_tods_;
  std::unordered_map<Term, Group, TermHash> groups_;
  std::vector<Term> keys_;
  std::uint64_t queries_ = 0;
  std::uint64_t off_answers_ = 0;
  std::uint64_t live_ = 0;
};

}  // namespace todx
