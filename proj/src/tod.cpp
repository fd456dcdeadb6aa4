#include "todx/tod.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace todx {

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Root: return "root";
    case NodeKind::Exit: return "exit";
    case NodeKind::Term: return "term";
    case NodeKind::Pos: return "pos";
    case NodeKind::Success: return "success";
  }
  return "?";
}

std::size_t TodNode::out_degree() const {
  return static_cast<std::size_t>(std::count_if(out.begin(), out.end(), [](NodeId n) { return n != kNoNode; }));
}

Tod::Tod(const Ordering& ord, TpoStore& store) : ord_(&ord), store_(&store) {
  root_ = alloc(NodeKind::Root);
  exit_ = alloc(NodeKind::Exit);
  link(root_, 0, exit_);
  nodes_[root_].visited = true;
  nodes_[root_].tpo = store.empty();
}

void Tod::require(bool cond, const char* what) const {
  if (!cond) {
    throw Error(ErrorKind::Precondition, what);
  }
}

std::uint8_t Tod::type_of(NodeKind k) {
  switch (k) {
    case NodeKind::Success: return kTypeSuccess;
    case NodeKind::Pos: return kTypePos;
    default: return kTypeTerm;
  }
}

NodeId Tod::alloc(NodeKind kind) {
  NodeId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    nodes_[id] = TodNode{};
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
  }
  nodes_[id].kind = kind;
  nodes_[id].alive = true;
  if (kind == NodeKind::Term || kind == NodeKind::Pos || kind == NodeKind::Success) {
    ++counters_.created[type_of(kind)];
  }
  return id;
}

void Tod::free_node(NodeId n) {
  nodes_[n] = TodNode{};
  free_.push_back(n);
}

void Tod::link(NodeId src, std::uint8_t slot, NodeId dst) {
  nodes_[src].out[slot] = dst;
  nodes_[dst].in.push_back({src, slot});
}

void Tod::unlink_in(NodeId dst, EdgeRef e) {
  auto& in = nodes_[dst].in;
  auto it = std::find(in.begin(), in.end(), e);
  if (it == in.end()) {
    throw Error(ErrorKind::Internal, "tod: missing in-edge");
  }
  in.erase(it);
}

void Tod::redirect(EdgeRef e, NodeId dst) {
  NodeId old = nodes_[e.src].out[e.slot];
  unlink_in(old, e);
  link(e.src, e.slot, dst);
}

// Detaches n from its successors and frees every node left without a
// parent, breadth first. The exit node is never freed.
void Tod::erase_cascade(NodeId n) {
  std::deque<NodeId> queue{n};
  while (!queue.empty()) {
    NodeId cur = queue.front();
    queue.pop_front();
    auto out = nodes_[cur].out;
    for (std::uint8_t s = 0; s < 3; ++s) {
      if (out[s] == kNoNode) {
        continue;
      }
      unlink_in(out[s], {cur, s});
      if (nodes_[out[s]].in.empty() && out[s] != exit_) {
        queue.push_back(out[s]);
      }
    }
    free_node(cur);
  }
}

NodeId Tod::make_term(Term l, Term r, std::array<NodeId, 3> out) {
  NodeId id = alloc(NodeKind::Term);
  nodes_[id].lhs = l;
  nodes_[id].rhs = r;
  for (std::uint8_t s = 0; s < 3; ++s) {
    link(id, s, out[s]);
  }
  return id;
}

NodeId Tod::make_pos(LinearExpr e, std::array<NodeId, 3> out) {
  NodeId id = alloc(NodeKind::Pos);
  nodes_[id].expr = std::move(e);
  for (std::uint8_t s = 0; s < 3; ++s) {
    link(id, s, out[s]);
  }
  return id;
}

std::size_t Tod::live_nodes() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const TodNode& n) { return n.alive; }));
}

std::vector<NodeId> Tod::live_ids() const {
  std::vector<NodeId> ids;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].alive) {
      ids.push_back(i);
    }
  }
  return ids;
}

void Tod::insert(EqId eq, Term lhs, Term rhs) {
  if (eqs_.count(eq)) {
    throw Error(ErrorKind::DuplicateId, "tod: equality " + std::to_string(eq) + " already inserted");
  }
  eqs_.emplace(eq, false);
  // The old exit keeps its in-edges and becomes the comparison node.
  NodeId cmp = exit_;
  NodeId new_exit = alloc(NodeKind::Exit);
  NodeId succ = alloc(NodeKind::Success);
  auto& c = nodes_[cmp];
  c.kind = NodeKind::Term;
  c.lhs = lhs;
  c.rhs = rhs;
  ++counters_.created[kTypeTerm];
  nodes_[succ].eq = eq;
  link(succ, 0, new_exit);
  link(cmp, kGt, succ);
  link(cmp, kEqGe, new_exit);
  link(cmp, kNge, new_exit);
  exit_ = new_exit;
}

void Tod::mark_deleted(EqId eq) {
  auto it = eqs_.find(eq);
  if (it == eqs_.end()) {
    throw Error(ErrorKind::UnknownId, "tod: unknown equality " + std::to_string(eq));
  }
  it->second = true;
}

bool Tod::is_deleted(EqId eq) const {
  auto it = eqs_.find(eq);
  return it != eqs_.end() && it->second;
}

Slot Tod::evaluate(NodeId n, const Substitution& sigma) const {
  const auto& node = nodes_.at(n);
  if (node.kind == NodeKind::Term) {
    return slot_of(ord_->compare_unidirectional({node.lhs, &sigma}, {node.rhs, &sigma}));
  }
  require(node.kind == NodeKind::Pos, "evaluate: not an evaluation node");
  LinearExpr e(node.expr.constant());
  for (auto [v, c] : node.expr.coefficients()) {
    if (auto img = sigma.find(v)) {
      e.add(ord_->weight_of(img), c);
    } else {
      e.add_var(v, c);
    }
  }
  return slot_of(sign(e, ord_->signature().w0()));
}

const PartialOrdering* Tod::base_tpo(EdgeRef via) {
  const auto& src = nodes_[via.src];
  const PartialOrdering* po = src.tpo;
  if (src.kind == NodeKind::Term) {
    po = store_->add_constraint(po, {src.lhs, src.rhs, static_cast<Cmp3>(via.slot)});
  }
  return po;
}

std::optional<Slot> Tod::force(NodeId n, EdgeRef via) {
  const auto& src = nodes_.at(via.src);
  require(src.visited, "force: parent not visited");
  require(src.out[via.slot] == n, "force: edge does not lead to node");
  const auto& node = nodes_[n];
  if (node.kind == NodeKind::Pos) {
    auto f = force_positivity(node.expr, ord_->signature().w0());
    return f ? std::optional<Slot>(slot_of(*f)) : std::nullopt;
  }
  require(node.kind == NodeKind::Term, "force: not an evaluation node");
  Term l = node.lhs;
  Term r = node.rhs;
  auto* po = base_tpo(via);
  po = store_->add_element(po, l);
  po = store_->add_element(po, r);
  auto f = force_term(*po, l, r);
  return f ? std::optional<Slot>(slot_of(*f)) : std::nullopt;
}

NodeId Tod::replicate(NodeId n, EdgeRef keep) {
  auto& node = nodes_.at(n);
  require(node.alive && node.kind != NodeKind::Exit && node.kind != NodeKind::Root, "replicate: bad node");
  require(node.in.size() >= 2, "replicate: single parent");
  require(std::find(node.in.begin(), node.in.end(), keep) != node.in.end(), "replicate: not a parent edge");
  NodeId copy = alloc(node.kind);
  auto& src = nodes_[n];  // alloc may reallocate
  auto& dst = nodes_[copy];
  dst.lhs = src.lhs;
  dst.rhs = src.rhs;
  dst.expr = src.expr;
  dst.eq = src.eq;
  auto out = src.out;
  auto moved = src.in;
  for (std::uint8_t s = 0; s < 3; ++s) {
    if (out[s] != kNoNode) {
      link(copy, s, out[s]);
    }
  }
  for (auto e : moved) {
    if (e != keep) {
      redirect(e, copy);
    }
  }
  return copy;
}

NodeId Tod::remove_forced(NodeId n, Slot slot) {
  const auto& node = nodes_.at(n);
  require(node.alive && (node.kind == NodeKind::Term || node.kind == NodeKind::Pos), "remove: bad node");
  require(!node.visited, "remove: node visited");
  require(node.in.size() == 1, "remove: several parents");
  NodeId target = node.out[slot];
  redirect(node.in.front(), target);
  erase_cascade(n);
  return target;
}

bool Tod::transformable(NodeId n) const {
  const auto& node = nodes_.at(n);
  return node.alive && node.kind == NodeKind::Term && !node.visited && !node.lhs.is_var() && !node.rhs.is_var();
}

NodeId Tod::transform(NodeId n) {
  require(transformable(n), "transform: not applicable");
  require(nodes_[n].in.size() == 1, "transform: several parents");
  return ord_->kind() == OrderKind::KBO ? transform_kbo(n) : transform_lpo(n);
}

NodeId Tod::transform_kbo(NodeId n) {
  const auto& sig = ord_->signature();
  Term s = nodes_[n].lhs;
  Term t = nodes_[n].rhs;
  auto [n1, n2, n3] = nodes_[n].out;
  LinearExpr e = ord_->weight_of(s) - ord_->weight_of(t);
  NodeId top;
  if (s.symbol() != t.symbol()) {
    if (sig.greater_precedence(s.symbol(), t.symbol())) {
      top = make_pos(std::move(e), {n1, n1, n3});
    } else {
      top = make_pos(std::move(e), {n1, n3, n3});
    }
  } else {
    NodeId next = n2;
    for (std::size_t i = s.arity(); i-- > 0;) {
      next = make_term(s.arg(i), t.arg(i), {n1, next, n3});
    }
    top = make_pos(std::move(e), {n1, next, n3});
  }
  redirect(nodes_[n].in.front(), top);
  erase_cascade(n);
  return top;
}

NodeId Tod::transform_lpo(NodeId n) {
  const auto& sig = ord_->signature();
  Term s = nodes_[n].lhs;
  Term t = nodes_[n].rhs;
  auto [n1, n2, n3] = nodes_[n].out;
  NodeId top;
  if (s.symbol() != t.symbol()) {
    if (sig.greater_precedence(s.symbol(), t.symbol())) {
      // s > t_j for every j
      top = n1;
      for (std::size_t j = t.arity(); j-- > 0;) {
        top = make_term(s, t.arg(j), {top, n3, n3});
      }
    } else {
      // s_i >= t for some i
      top = n3;
      for (std::size_t i = s.arity(); i-- > 0;) {
        top = make_term(s.arg(i), t, {n1, n1, top});
      }
    }
  } else {
    std::size_t k = s.arity();
    // allgt[j]: s ? t_j ... t_k all greater; alllt[j]: some s_j ... s_k >= t
    std::vector<NodeId> allgt(k + 1, n1);
    std::vector<NodeId> alllt(k + 1, n3);
    for (std::size_t j = k; j-- > 1;) {
      allgt[j] = make_term(s, t.arg(j), {allgt[j + 1], n3, n3});
      alllt[j] = make_term(s.arg(j), t, {n1, n1, alllt[j + 1]});
    }
    top = n2;
    for (std::size_t j = k; j-- > 0;) {
      top = make_term(s.arg(j), t.arg(j), {allgt[j + 1], top, alllt[j + 1]});
    }
  }
  redirect(nodes_[n].in.front(), top);
  erase_cascade(n);
  return top;
}

std::vector<EqId> Tod::retrieve(const Substitution& sigma, Want want) {
  ++counters_.retrievals;
  std::vector<EqId> result;
  EdgeRef via{root_, 0};
  NodeId cur = nodes_[root_].out[0];
  for (std::uint64_t steps = 0;; ++steps) {
    if (steps >= kStepCap) {
      throw Error(ErrorKind::StepCap, "tod: retrieval exceeded the step cap");
    }
    auto kind = nodes_[cur].kind;
    if (kind == NodeKind::Exit) {
      ++counters_.answers;
      return result;
    }
    if (!nodes_[cur].visited) {
      ++counters_.processed[type_of(kind)];
      if (nodes_[cur].in.size() > 1) {
        replicate(cur, via);
      }
      if (kind != NodeKind::Success) {
        if (auto f = force(cur, via)) {
          cur = remove_forced(cur, *f);
          continue;
        }
        if (transformable(cur)) {
          cur = transform(cur);
          continue;
        }
      }
      auto* po = base_tpo(via);
      if (kind == NodeKind::Term) {
        po = store_->add_element(po, nodes_[cur].lhs);
        po = store_->add_element(po, nodes_[cur].rhs);
      }
      nodes_[cur].tpo = po;
      nodes_[cur].visited = true;
    }
    ++counters_.traversed[type_of(kind)];
    Slot slot = kGt;
    if (kind == NodeKind::Success) {
      EqId eq = nodes_[cur].eq;
      if (!is_deleted(eq)) {
        result.push_back(eq);
        ++counters_.answers;
        if (want == Want::First) {
          return result;
        }
      }
    } else {
      slot = evaluate(cur, sigma);
    }
    via = {cur, slot};
    cur = nodes_[cur].out[slot];
  }
}

std::vector<EdgeRef> Tod::root_path(NodeId n) const {
  require(nodes_.at(n).visited, "root_path: node not visited");
  std::vector<EdgeRef> path;
  while (n != root_) {
    const auto& node = nodes_[n];
    require(node.in.size() == 1, "root_path: visited node with several parents");
    path.push_back(node.in.front());
    n = node.in.front().src;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::string Tod::check_invariants() const {
  std::ostringstream err;
  auto bad = [&err](NodeId id, const std::string& what) {
    err << "node " << id << ": " << what;
    return err.str();
  };
  if (!nodes_.at(root_).alive || nodes_[root_].kind != NodeKind::Root) {
    return "root missing";
  }
  if (!nodes_.at(exit_).alive || nodes_[exit_].kind != NodeKind::Exit) {
    return "exit missing";
  }
  // out-degrees and in-list consistency
  std::vector<std::vector<EdgeRef>> expected_in(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!n.alive) {
      continue;
    }
    if (n.kind == NodeKind::Root && i != root_) {
      return bad(i, "second root");
    }
    if (n.kind == NodeKind::Exit && i != exit_) {
      return bad(i, "second exit");
    }
    std::size_t want = 3;
    if (n.kind == NodeKind::Exit) {
      want = 0;
    } else if (n.kind == NodeKind::Root || n.kind == NodeKind::Success) {
      want = 1;
    }
    if (n.out_degree() != want || (want == 1 && n.out[0] == kNoNode)) {
      return bad(i, "wrong out-degree");
    }
    for (std::uint8_t s = 0; s < 3; ++s) {
      if (n.out[s] == kNoNode) {
        continue;
      }
      if (n.out[s] >= nodes_.size() || !nodes_[n.out[s]].alive) {
        return bad(i, "edge to a dead node");
      }
      expected_in[n.out[s]].push_back({i, s});
    }
  }
  auto key = [](const EdgeRef& a, const EdgeRef& b) { return std::tie(a.src, a.slot) < std::tie(b.src, b.slot); };
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive) {
      continue;
    }
    auto a = expected_in[i];
    auto b = nodes_[i].in;
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    if (a != b) {
      return bad(i, "in-edge list out of sync");
    }
    if (i != root_ && b.empty()) {
      return bad(i, "no parent");
    }
  }
  // acyclicity and reachability: iterative DFS with colors
  std::vector<std::uint8_t> color(nodes_.size(), 0);
  std::vector<std::pair<NodeId, std::uint8_t>> stack{{root_, 0}};
  color[root_] = 1;
  while (!stack.empty()) {
    auto& [id, s] = stack.back();
    if (s == 3) {
      color[id] = 2;
      stack.pop_back();
      continue;
    }
    NodeId next = nodes_[id].out[s++];
    if (next == kNoNode) {
      continue;
    }
    if (color[next] == 1) {
      return bad(next, "cycle");
    }
    if (color[next] == 0) {
      color[next] = 1;
      stack.push_back({next, 0});
    }
  }
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].alive && color[i] != 2) {
      return bad(i, "unreachable from root");
    }
  }
  // visited nodes hang off a single visited parent
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!n.alive || !n.visited || i == root_) {
      continue;
    }
    if (n.in.size() != 1) {
      return bad(i, "visited node with several parents");
    }
    if (!nodes_[n.in.front().src].visited) {
      return bad(i, "visited node below an unvisited one");
    }
    if (n.tpo == nullptr) {
      return bad(i, "visited node without partial ordering");
    }
  }
  return {};
}

std::string Tod::dump() const {
  const auto& sig = ord_->signature();
  std::ostringstream os;
  auto target = [this](NodeId id) { return id == kNoNode ? std::string("-") : std::to_string(id); };
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!n.alive) {
      continue;
    }
    os << i << ' ' << to_string(n.kind);
    if (n.visited && i != root_) {
      os << '*';
    }
    switch (n.kind) {
      case NodeKind::Term:
        os << ' ' << to_string(sig, n.lhs) << " ? " << to_string(sig, n.rhs);
        break;
      case NodeKind::Pos:
        os << ' ' << n.expr.to_string() << " ? 0";
        break;
      case NodeKind::Success:
        os << " e" << n.eq;
        break;
      default:
        break;
    }
    if (n.kind == NodeKind::Term || n.kind == NodeKind::Pos) {
      os << " -> " << target(n.out[0]) << ',' << target(n.out[1]) << ',' << target(n.out[2]);
    } else if (n.kind != NodeKind::Exit) {
      os << " -> " << target(n.out[0]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace todx
