#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "oracle.hpp"
#include "todx/tod.hpp"

using namespace todx;

namespace {

struct Fixture {
  std::shared_ptr<Signature> sig = std::make_shared<Signature>();
  std::unique_ptr<TermBank> bank;
  std::unique_ptr<Ordering> ord;
  std::unique_ptr<TpoStore> store;
  std::unique_ptr<Tod> tod;

  // KBO: f/2, g/1, a, b with unit weights, f >> g >> a >> b.
  // LPO: g/1, f/2, c, a, b with g >> f >> c >> a >> b.
  explicit Fixture(OrderKind kind = OrderKind::KBO) {
    if (kind == OrderKind::KBO) {
      sig->add("f", 2, 1, 4);
      sig->add("g", 1, 1, 3);
      sig->add("a", 0, 1, 2);
      sig->add("b", 0, 1, 1);
    } else {
      sig->add("g", 1, 1, 6);
      sig->add("f", 2, 1, 5);
      sig->add("c", 0, 1, 3);
      sig->add("a", 0, 1, 2);
      sig->add("b", 0, 1, 1);
    }
    bank = std::make_unique<TermBank>(sig);
    ord = std::make_unique<Ordering>(*sig, kind);
    store = std::make_unique<TpoStore>(*ord);
    tod = std::make_unique<Tod>(*ord, *store);
  }
  Term x() { return bank->var(0); }
  Term y() { return bank->var(1); }
  Term f(Term s, Term t) { return bank->app("f", {s, t}); }
  Term g(Term s) { return bank->app("g", {s}); }
  Term c(const char* name) { return bank->app(name, {}); }

  Substitution sub(Term xs, Term ys) {
    Substitution s;
    s.bind(0, xs);
    s.bind(1, ys);
    return s;
  }

  NodeId first() const { return tod->node(tod->root()).out[0]; }
  const TodNode& at(NodeId n) const { return tod->node(n); }
  bool is_term(NodeId n, Term l, Term r) const {
    return at(n).kind == NodeKind::Term && at(n).lhs == l && at(n).rhs == r;
  }
  bool is_success(NodeId n, EqId eq) const { return at(n).kind == NodeKind::Success && at(n).eq == eq; }
  std::string check() const { return tod->check_invariants(); }
};

// Root-to-exit label sequences, as a multiset.
void collect_paths(const Tod& tod, NodeId n, std::string prefix, std::multiset<std::string>& out) {
  const auto& node = tod.node(n);
  if (node.kind == NodeKind::Exit) {
    out.insert(prefix);
    return;
  }
  std::string label = to_string(node.kind);
  if (node.kind == NodeKind::Term) {
    label += "(" + to_string(tod.ordering().signature(), node.lhs) + "," +
             to_string(tod.ordering().signature(), node.rhs) + ")";
  } else if (node.kind == NodeKind::Pos) {
    label += "(" + node.expr.to_string() + ")";
  } else if (node.kind == NodeKind::Success) {
    label += std::to_string(node.eq);
  }
  for (std::uint8_t s = 0; s < 3; ++s) {
    if (node.out[s] != kNoNode) {
      collect_paths(tod, node.out[s], prefix + label + "/" + std::to_string(s) + " ", out);
    }
  }
}

std::multiset<std::string> paths(const Tod& tod) {
  std::multiset<std::string> out;
  collect_paths(tod, tod.root(), "", out);
  return out;
}

}  // namespace

TEST_CASE("insert into an empty diagram") {
  Fixture fx;
  CHECK(fx.at(fx.first()).kind == NodeKind::Exit);
  fx.tod->insert(0, fx.f(fx.x(), fx.y()), fx.f(fx.y(), fx.x()));
  NodeId t = fx.first();
  REQUIRE(fx.is_term(t, fx.f(fx.x(), fx.y()), fx.f(fx.y(), fx.x())));
  NodeId s = fx.at(t).out[kGt];
  CHECK(fx.is_success(s, 0));
  CHECK(fx.at(s).out[0] == fx.tod->exit());
  CHECK(fx.at(t).out[kEqGe] == fx.tod->exit());
  CHECK(fx.at(t).out[kNge] == fx.tod->exit());
  CHECK(fx.tod->counters().created[kTypeTerm] == 1);
  CHECK(fx.tod->counters().created[kTypeSuccess] == 1);
  CHECK(fx.check().empty());
  CHECK_THROWS_AS(fx.tod->insert(0, fx.x(), fx.y()), Error);
}

TEST_CASE("second insert hangs off the old exit") {
  Fixture fx;
  fx.tod->insert(0, fx.f(fx.x(), fx.y()), fx.f(fx.y(), fx.x()));
  fx.tod->insert(1, fx.f(fx.x(), fx.y()), fx.f(fx.x(), fx.x()));
  NodeId t1 = fx.first();
  NodeId t2 = fx.at(t1).out[kEqGe];
  CHECK(fx.is_term(t2, fx.f(fx.x(), fx.y()), fx.f(fx.x(), fx.x())));
  CHECK(fx.at(t1).out[kNge] == t2);
  CHECK(fx.at(fx.at(t1).out[kGt]).out[0] == t2);
  CHECK(fx.at(t2).in.size() == 3);
  CHECK(fx.is_success(fx.at(t2).out[kGt], 1));
  CHECK(fx.check().empty());
}

TEST_CASE("empty diagram retrieves nothing") {
  Fixture fx;
  CHECK(fx.tod->retrieve(fx.sub(fx.c("a"), fx.c("b")), Want::All).empty());
}

TEST_CASE("swap equality with equal instances: nothing, and x?y is left visited") {
  Fixture fx;
  Term x = fx.x(), y = fx.y();
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  auto res = fx.tod->retrieve(fx.sub(fx.c("a"), fx.c("a")), Want::All);
  CHECK(res.empty());
  NodeId n = fx.first();
  REQUIRE(fx.is_term(n, x, y));
  CHECK(fx.at(n).visited);
  CHECK(fx.at(n).out[kEqGe] == fx.tod->exit());
  CHECK(fx.is_success(fx.at(n).out[kGt], 0));
  CHECK(fx.at(n).out[kNge] == fx.tod->exit());
  CHECK(fx.tod->live_nodes() == 4);
  CHECK(fx.check().empty());
}

TEST_CASE("adding f(x,y) = f(x,x) and querying with x > y returns only the swap equality") {
  Fixture fx;
  Term x = fx.x(), y = fx.y();
  Term a = fx.c("a"), b = fx.c("b");
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  CHECK(fx.tod->retrieve(fx.sub(a, a), Want::All).empty());
  fx.tod->insert(1, fx.f(x, y), fx.f(x, x));
  auto res = fx.tod->retrieve(fx.sub(fx.f(a, a), a), Want::All);
  CHECK(res == std::vector<EqId>{0});
  auto ymx = LinearExpr::variable(1) - LinearExpr::variable(0);
  std::vector<NodeId> pos;
  for (auto id : fx.tod->live_ids()) {
    if (fx.at(id).kind == NodeKind::Pos && fx.at(id).expr == ymx) {
      pos.push_back(id);
    }
  }
  REQUIRE(pos.size() == 1);
  CHECK(fx.at(pos[0]).visited);
  CHECK(fx.check().empty());

  // Behind x > y, the >= edge of y - x can only lead to y ? x failing, so
  // both x ? x and y ? x are forced away.
  CHECK(fx.tod->retrieve(fx.sub(a, b), Want::All) == std::vector<EqId>{0});
  CHECK(fx.at(pos[0]).out[kEqGe] == fx.tod->exit());
  CHECK(fx.check().empty());
}

TEST_CASE("f(x,y) = f(x,x) alone specializes to y - x followed by y ? x") {
  Fixture fx;
  Term x = fx.x(), y = fx.y();
  fx.tod->insert(0, fx.f(x, y), fx.f(x, x));
  CHECK(fx.tod->retrieve(fx.sub(fx.c("a"), fx.c("b")), Want::All).empty());
  NodeId p = fx.first();
  REQUIRE(fx.at(p).kind == NodeKind::Pos);
  CHECK(fx.at(p).expr == LinearExpr::variable(1) - LinearExpr::variable(0));
  CHECK(fx.is_success(fx.at(p).out[kGt], 0));
  CHECK(fx.at(p).out[kNge] == fx.tod->exit());
  NodeId q = fx.at(p).out[kEqGe];
  REQUIRE(fx.is_term(q, y, x));
  CHECK(fx.at(q).out[kGt] == fx.at(p).out[kGt]);
  CHECK(fx.at(q).out[kEqGe] == fx.tod->exit());
  CHECK(fx.at(q).out[kNge] == fx.tod->exit());
  CHECK(fx.check().empty());
}

TEST_CASE("evaluation of comparison and positivity nodes") {
  Fixture fx;
  Term x = fx.x(), y = fx.y(), a = fx.c("a");
  fx.tod->insert(0, fx.f(x, y), fx.f(x, x));
  NodeId p = fx.tod->transform(fx.first());
  REQUIRE(fx.at(p).kind == NodeKind::Pos);
  CHECK(fx.tod->evaluate(p, fx.sub(a, fx.f(a, a))) == kGt);
  CHECK(fx.tod->evaluate(p, fx.sub(a, fx.c("b"))) == kEqGe);
  CHECK(fx.tod->evaluate(p, fx.sub(fx.g(a), a)) == kNge);
  NodeId xx = fx.at(p).out[kEqGe];
  REQUIRE(fx.is_term(xx, x, x));
  NodeId yx = fx.at(xx).out[kEqGe];
  REQUIRE(fx.is_term(yx, y, x));
  CHECK(fx.tod->evaluate(yx, fx.sub(a, a)) == kEqGe);
  CHECK(fx.tod->evaluate(yx, fx.sub(a, fx.g(a))) == kGt);
  CHECK(fx.tod->evaluate(yx, fx.sub(fx.g(a), a)) == kNge);
}

TEST_CASE("KBO transformation, equal heads") {
  Fixture fx;
  Term x = fx.x(), y = fx.y();
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  NodeId succ = fx.at(fx.first()).out[kGt];
  NodeId exit = fx.tod->exit();
  NodeId p = fx.tod->transform(fx.first());
  CHECK(fx.first() == p);
  REQUIRE(fx.at(p).kind == NodeKind::Pos);
  CHECK(fx.at(p).expr.is_zero());
  CHECK(fx.at(p).out[kGt] == succ);
  CHECK(fx.at(p).out[kNge] == exit);
  NodeId c1 = fx.at(p).out[kEqGe];
  REQUIRE(fx.is_term(c1, x, y));
  CHECK(fx.at(c1).out[kGt] == succ);
  CHECK(fx.at(c1).out[kNge] == exit);
  NodeId c2 = fx.at(c1).out[kEqGe];
  REQUIRE(fx.is_term(c2, y, x));
  CHECK(fx.at(c2).out == std::array<NodeId, 3>{succ, exit, exit});
  CHECK(fx.tod->counters().created[kTypePos] == 1);
  CHECK(fx.tod->counters().created[kTypeTerm] == 3);
  CHECK(fx.check().empty());
}

TEST_CASE("KBO transformation, different heads") {
  Fixture fx;
  fx.tod->insert(0, fx.c("a"), fx.c("b"));
  NodeId succ = fx.at(fx.first()).out[kGt];
  NodeId p = fx.tod->transform(fx.first());
  REQUIRE(fx.at(p).kind == NodeKind::Pos);
  CHECK(fx.at(p).expr.is_zero());
  CHECK(fx.at(p).out == std::array<NodeId, 3>{succ, succ, fx.tod->exit()});
  CHECK(fx.tod->retrieve(Substitution{}, Want::All) == std::vector<EqId>{0});

  Fixture rev;
  rev.tod->insert(0, rev.c("b"), rev.c("a"));
  NodeId s2 = rev.at(rev.first()).out[kGt];
  NodeId q = rev.tod->transform(rev.first());
  CHECK(rev.at(q).out == std::array<NodeId, 3>{s2, rev.tod->exit(), rev.tod->exit()});
}

TEST_CASE("LPO transformation, equal heads builds the grid") {
  Fixture fx(OrderKind::LPO);
  Term x = fx.x(), y = fx.y();
  Term s = fx.f(x, y), t = fx.f(y, x);
  fx.tod->insert(0, s, t);
  NodeId succ = fx.at(fx.first()).out[kGt];
  NodeId exit = fx.tod->exit();
  NodeId top = fx.tod->transform(fx.first());
  REQUIRE(fx.is_term(top, x, y));
  NodeId gt = fx.at(top).out[kGt];
  NodeId eq = fx.at(top).out[kEqGe];
  NodeId nge = fx.at(top).out[kNge];
  REQUIRE(fx.is_term(gt, s, x));
  CHECK(fx.at(gt).out == std::array<NodeId, 3>{succ, exit, exit});
  REQUIRE(fx.is_term(nge, y, t));
  CHECK(fx.at(nge).out == std::array<NodeId, 3>{succ, succ, exit});
  REQUIRE(fx.is_term(eq, y, x));
  CHECK(fx.at(eq).out == std::array<NodeId, 3>{succ, exit, exit});
  CHECK(fx.check().empty());
}

TEST_CASE("LPO transformation, bigger left head") {
  Fixture fx(OrderKind::LPO);
  Term a = fx.c("a"), b = fx.c("b");
  Term s = fx.g(fx.x());
  fx.tod->insert(0, s, fx.f(a, b));
  NodeId succ = fx.at(fx.first()).out[kGt];
  NodeId exit = fx.tod->exit();
  NodeId c1 = fx.tod->transform(fx.first());
  REQUIRE(fx.is_term(c1, s, a));
  NodeId c2 = fx.at(c1).out[kGt];
  REQUIRE(fx.is_term(c2, s, b));
  CHECK(fx.at(c1).out[kEqGe] == exit);
  CHECK(fx.at(c1).out[kNge] == exit);
  CHECK(fx.at(c2).out == std::array<NodeId, 3>{succ, exit, exit});
}

TEST_CASE("LPO transformation, constant against a bigger head") {
  Fixture fx(OrderKind::LPO);
  fx.tod->insert(0, fx.c("c"), fx.g(fx.x()));
  NodeId top = fx.tod->transform(fx.first());
  CHECK(top == fx.tod->exit());
  CHECK(fx.first() == fx.tod->exit());
  CHECK(fx.tod->live_nodes() == 2);
  CHECK(fx.check().empty());
}

TEST_CASE("LPO transformation, bigger right head") {
  Fixture fx(OrderKind::LPO);
  Term x = fx.x(), y = fx.y();
  Term t = fx.g(y);
  fx.tod->insert(0, fx.f(x, y), t);
  NodeId succ = fx.at(fx.first()).out[kGt];
  NodeId exit = fx.tod->exit();
  NodeId c1 = fx.tod->transform(fx.first());
  REQUIRE(fx.is_term(c1, x, t));
  NodeId c2 = fx.at(c1).out[kNge];
  REQUIRE(fx.is_term(c2, y, t));
  CHECK(fx.at(c1).out[kGt] == succ);
  CHECK(fx.at(c1).out[kEqGe] == succ);
  CHECK(fx.at(c2).out == std::array<NodeId, 3>{succ, succ, exit});
}

TEST_CASE("transformations need compound sides and a single parent") {
  Fixture fx;
  fx.tod->insert(0, fx.x(), fx.y());
  CHECK_FALSE(fx.tod->transformable(fx.first()));
  CHECK_THROWS_AS(fx.tod->transform(fx.first()), Error);
}

TEST_CASE("replication") {
  Fixture fx;
  Term x = fx.x(), y = fx.y();
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  fx.tod->insert(1, fx.f(x, y), fx.f(x, x));
  auto before = paths(*fx.tod);
  NodeId t1 = fx.first();
  NodeId s1 = fx.at(t1).out[kGt];
  NodeId t2 = fx.at(s1).out[0];
  CHECK_THROWS_AS(fx.tod->replicate(t1, EdgeRef{fx.tod->root(), 0}), Error);
  NodeId copy = fx.tod->replicate(t2, EdgeRef{s1, 0});
  CHECK(fx.at(t2).in == std::vector<EdgeRef>{EdgeRef{s1, 0}});
  CHECK(fx.at(copy).in.size() == 2);
  CHECK(fx.at(t1).out[kEqGe] == copy);
  CHECK(fx.at(t1).out[kNge] == copy);
  CHECK(fx.at(copy).out == fx.at(t2).out);
  CHECK(fx.is_term(copy, fx.f(x, y), fx.f(x, x)));
  CHECK(paths(*fx.tod) == before);
  CHECK(fx.check().empty());
}

TEST_CASE("forced removal cascades through unreachable nodes") {
  Fixture fx;
  Term x = fx.x(), y = fx.y();
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  fx.tod->insert(1, fx.f(x, y), fx.f(x, x));
  NodeId t1 = fx.first();
  NodeId s1 = fx.at(t1).out[kGt];
  NodeId t2 = fx.at(t1).out[kNge];
  NodeId res = fx.tod->remove_forced(t1, kNge);
  CHECK(res == t2);
  CHECK(fx.first() == t2);
  CHECK_FALSE(fx.at(t1).alive);
  CHECK_FALSE(fx.at(s1).alive);
  CHECK(fx.at(t2).in == std::vector<EdgeRef>{EdgeRef{fx.tod->root(), 0}});
  CHECK(fx.tod->live_nodes() == 4);
  CHECK(fx.check().empty());
}

TEST_CASE("lazy deletion") {
  Fixture fx;
  Term x = fx.x(), y = fx.y(), a = fx.c("a");
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  fx.tod->insert(1, fx.f(x, y), fx.f(x, x));
  auto sigma = fx.sub(fx.f(a, a), a);
  CHECK(fx.tod->retrieve(sigma, Want::All) == std::vector<EqId>{0});
  auto live = fx.tod->live_nodes();
  fx.tod->mark_deleted(0);
  fx.tod->mark_deleted(0);
  CHECK(fx.tod->is_deleted(0));
  CHECK(fx.tod->live_nodes() == live);
  CHECK(fx.tod->retrieve(sigma, Want::All).empty());
  CHECK_THROWS_AS(fx.tod->mark_deleted(7), Error);
  fx.tod->insert(2, fx.f(x, y), fx.f(y, x));
  CHECK(fx.tod->retrieve(sigma, Want::All) == std::vector<EqId>{2});
}

TEST_CASE("first mode stops at the first live success") {
  Fixture fx;
  Term x = fx.x(), y = fx.y(), a = fx.c("a");
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  fx.tod->insert(1, fx.f(x, y), fx.f(y, y));
  auto sigma = fx.sub(fx.f(a, a), a);
  auto first = fx.tod->retrieve(sigma, Want::First);
  auto all = fx.tod->retrieve(sigma, Want::All);
  CHECK(all == std::vector<EqId>{0, 1});
  CHECK(first == std::vector<EqId>{0});
  fx.tod->mark_deleted(0);
  CHECK(fx.tod->retrieve(sigma, Want::First) == std::vector<EqId>{1});
}

TEST_CASE("repeating a query processes nothing new") {
  Fixture fx;
  Term x = fx.x(), y = fx.y(), a = fx.c("a"), b = fx.c("b");
  fx.tod->insert(0, fx.f(x, y), fx.f(y, x));
  fx.tod->insert(1, fx.f(x, y), fx.f(x, x));
  auto sigma = fx.sub(fx.g(b), fx.f(a, b));
  auto r1 = fx.tod->retrieve(sigma, Want::All);
  auto processed = fx.tod->counters().processed;
  auto created = fx.tod->counters().created;
  auto r2 = fx.tod->retrieve(sigma, Want::All);
  CHECK(r1 == r2);
  CHECK(fx.tod->counters().processed == processed);
  CHECK(fx.tod->counters().created == created);
}

TEST_CASE("identical operations give identical diagrams") {
  auto build = [] {
    auto fx = std::make_unique<Fixture>();
    Term x = fx->x(), y = fx->y(), a = fx->c("a"), b = fx->c("b");
    fx->tod->insert(0, fx->f(x, y), fx->f(y, x));
    fx->tod->retrieve(fx->sub(a, b), Want::All);
    fx->tod->insert(1, fx->f(x, y), fx->f(x, x));
    fx->tod->retrieve(fx->sub(fx->g(a), b), Want::All);
    fx->tod->retrieve(fx->sub(b, fx->g(a)), Want::First);
    return fx;
  };
  auto p = build();
  auto q = build();
  CHECK(p->tod->dump() == q->tod->dump());
  CHECK(p->tod->counters().processed == q->tod->counters().processed);
  CHECK(p->tod->counters().traversed == q->tod->counters().traversed);
}

TEST_CASE("random diagrams agree with instantiate-and-compare") {
  for (auto kind : {OrderKind::KBO, OrderKind::LPO}) {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
      oracle::World w(seed * 2 + (kind == OrderKind::LPO));
      Ordering ord(*w.sig, kind);
      TpoStore store(ord);
      Tod tod(ord, store);
      Term l = w.term(3, 3, 0.6);
      std::vector<VarId> lv;
      collect_vars(l, lv);
      std::vector<std::pair<Term, bool>> eqs;
      std::map<NodeId, std::vector<EdgeRef>> visited;
      for (int step = 0; step < 40; ++step) {
        unsigned op = w.pick(10);
        if (op < 2 && eqs.size() < 6) {
          Term r = lv.empty() ? w.term(3, 0) : w.term(3, 3, 0.6);
          std::vector<VarId> rv;
          collect_vars(r, rv);
          bool ok = std::all_of(rv.begin(), rv.end(),
                                [&](VarId v) { return std::find(lv.begin(), lv.end(), v) != lv.end(); });
          if (ok) {
            tod.insert(static_cast<EqId>(eqs.size()), l, r);
            eqs.push_back({r, false});
          }
        } else if (op == 2 && !eqs.empty()) {
          auto id = w.pick(static_cast<unsigned>(eqs.size()));
          tod.mark_deleted(id);
          eqs[id].second = true;
        } else {
          Substitution sigma;
          for (VarId v = 0; v < 3; ++v) {
            sigma.bind(v, w.term(2, 2, 0.2, kQueryVarBase));
          }
          auto got = tod.retrieve(sigma, Want::All);
          std::vector<EqId> want;
          Term li = apply(*w.bank, l, sigma);
          for (EqId i = 0; i < eqs.size(); ++i) {
            if (!eqs[i].second && ord.compare(li, apply(*w.bank, eqs[i].first, sigma)) == Cmp3::Greater) {
              want.push_back(i);
            }
          }
          REQUIRE(got == want);
        }
        auto err = tod.check_invariants();
        INFO(tod.dump());
        REQUIRE(err == "");
        for (const auto& [id, path] : visited) {
          REQUIRE(tod.node(id).visited);
          REQUIRE(tod.root_path(id) == path);
        }
        for (auto id : tod.live_ids()) {
          if (tod.node(id).visited && id != tod.root() && !visited.count(id)) {
            visited.emplace(id, tod.root_path(id));
          }
        }
      }
    }
  }
}
