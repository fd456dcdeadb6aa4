#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "todx/ordering.hpp"
#include "todx/partial_ordering.hpp"
#include "todx/terms.hpp"

namespace todx {

using NodeId = std::uint32_t;
using EqId = std::uint32_t;

inline constexpr NodeId kNoNode = ~NodeId{0};

enum class NodeKind : std::uint8_t { Root, Exit, Term, Pos, Success };

const char* to_string(NodeKind k);

/// Edge slots. Term nodes use >, =, !>=; positivity nodes >, >=, !>=;
/// root and success nodes only the first slot.
enum Slot : std::uint8_t { kGt = 0, kEqGe = 1, kNge = 2 };

inline Slot slot_of(Cmp3 c) { return static_cast<Slot>(c); }
inline Slot slot_of(Sign3 s) { return static_cast<Slot>(s); }

struct EdgeRef {
  NodeId src = kNoNode;
  std::uint8_t slot = 0;
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

struct TodNode {
  NodeKind kind = NodeKind::Exit;
  bool alive = false;
  bool visited = false;
  Term lhs;
  Term rhs;
  LinearExpr expr;
  EqId eq = 0;
  std::array<NodeId, 3> out{kNoNode, kNoNode, kNoNode};
  std::vector<EdgeRef> in;
  // Set once visited: what the path up to here implies.
  const PartialOrdering* tpo = nullptr;

  std::size_t out_degree() const;
};

/// Counter index by node type.
enum NodeType : std::uint8_t { kTypeTerm = 0, kTypeSuccess = 1, kTypePos = 2 };

struct TodCounters {
  std::array<std::uint64_t, 3> created{};
  std::array<std::uint64_t, 3> processed{};
  std::array<std::uint64_t, 3> traversed{};
  std::uint64_t answers = 0;
  std::uint64_t retrievals = 0;
};

enum class Want : std::uint8_t { First, All };

/// Term ordering diagram over the equalities l = r_i of one left-hand side.
///
/// Retrieval specializes the diagram lazily: nodes are forced away,
/// expanded by the ordering-specific transformations, or marked visited the
/// first time a traversal reaches them.
class Tod {
 public:
  static constexpr std::uint64_t kStepCap = 1'000'000;

  Tod(const Ordering& ord, TpoStore& store);
  Tod(const Tod&) = delete;
  Tod& operator=(const Tod&) = delete;
  Tod(Tod&&) = default;

  NodeId root() const { return root_; }
  NodeId exit() const { return exit_; }
  const TodNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t capacity() const { return nodes_.size(); }
  std::size_t live_nodes() const;
  std::vector<NodeId> live_ids() const;
  const TodCounters& counters() const { return counters_; }
  const Ordering& ordering() const { return *ord_; }

  void insert(EqId eq, Term lhs, Term rhs);
  void mark_deleted(EqId eq);
  bool is_deleted(EqId eq) const;
  bool contains(EqId eq) const { return eqs_.count(eq) != 0; }

  std::vector<EqId> retrieve(const Substitution& sigma, Want want);

  /// sigma(s ? t) or sigma(e ? 0) as an edge slot.
  Slot evaluate(NodeId n, const Substitution& sigma) const;

  /// Label forced at unvisited evaluation node n when reached through
  /// `via`, whose source must be the root or visited.
  std::optional<Slot> force(NodeId n, EdgeRef via);

  /// Whether the KBO/LPO transformation applies to n.
  bool transformable(NodeId n) const;
  /// Replaces n by its transformation; returns the node now at n's place.
  NodeId transform(NodeId n);
  /// Moves every in-edge of n except `keep` to a fresh copy of n.
  NodeId replicate(NodeId n, EdgeRef keep);
  /// Redirects n's single in-edge to its `slot` successor and removes what
  /// becomes unreachable. Returns that successor.
  NodeId remove_forced(NodeId n, Slot slot);

  /// Edges from the root to n; n must be visited (so the path is unique).
  std::vector<EdgeRef> root_path(NodeId n) const;

  /// Empty when well-formed, otherwise a description of the first problem.
  std::string check_invariants() const;

  std::string dump() const;

 private:
  NodeId alloc(NodeKind kind);
  void free_node(NodeId n);
  void link(NodeId src, std::uint8_t slot, NodeId dst);
  void unlink_in(NodeId dst, EdgeRef e);
  void redirect(EdgeRef e, NodeId dst);
  void erase_cascade(NodeId n);
  NodeId make_term(Term l, Term r, std::array<NodeId, 3> out);
  NodeId make_pos(LinearExpr e, std::array<NodeId, 3> out);
  NodeId transform_kbo(NodeId n);
  NodeId transform_lpo(NodeId n);
  const PartialOrdering* base_tpo(EdgeRef via);
  void require(bool cond, const char* what) const;
  static std::uint8_t type_of(NodeKind k);

  const Ordering* ord_;
  TpoStore* store_;
  std::vector<TodNode> nodes_;
  std::vector<NodeId> free_;
  NodeId root_;
  NodeId exit_;
  // inserted equalities and their deleted flag
  std::unordered_map<EqId, bool> eqs_;
  TodCounters counters_;
};

}  // namespace todx
