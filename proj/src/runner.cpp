#include "todx/runner.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace todx {

bool RunReport::ok() const {
  if (!divergences.empty()) {
    return false;
  }
  for (const auto& m : modes) {
    if (!m.error.empty()) {
      return false;
    }
  }
  return std::all_of(expects.begin(), expects.end(), [](const ExpectResult& e) { return e.pass; });
}

namespace {

// Query variables are looked up by the names the first equality of a group
// gave to its left-hand side variables.
struct GroupNames {
  Term key;
  std::vector<std::string> names;
};

std::vector<std::string> lhs_names(Term l, const VarNaming& naming) {
  std::vector<VarId> vars;
  collect_vars(l, vars);
  return {naming.names().begin(), naming.names().begin() + static_cast<std::ptrdiff_t>(vars.size())};
}

// Builds sigma over canonical variables 0..k-1 from named bindings, or
// nullopt if a name is unbound.
std::optional<Substitution> bind_names(const std::vector<std::string>& names,
                                       const std::unordered_map<std::string, Term>& images) {
  Substitution s;
  for (VarId i = 0; i < names.size(); ++i) {
    auto it = images.find(names[i]);
    if (it == images.end()) {
      return std::nullopt;
    }
    s.bind(i, it->second);
  }
  return s;
}

std::unordered_map<std::string, Term> intern_bindings(TermBank& bank, const QueryCmd& q) {
  VarNaming qnames(kQueryVarBase);
  std::unordered_map<std::string, Term> images;
  for (const auto& [name, raw] : q.bindings) {
    images.emplace(name, bank.intern(raw, qnames));
  }
  return images;
}

class StructureChecker {
 public:
  std::string check(const PostOrderingIndex& index) {
    std::string err;
    index.for_each_tod([&](const Tod& tod) {
      if (!err.empty()) {
        return;
      }
      err = tod.check_invariants();
      if (!err.empty()) {
        return;
      }
      auto& known = paths_[&tod];
      for (const auto& [id, path] : known) {
        if (!tod.node(id).alive || !tod.node(id).visited || tod.root_path(id) != path) {
          err = "visited node " + std::to_string(id) + " changed its root path";
          return;
        }
      }
      for (auto id : tod.live_ids()) {
        if (tod.node(id).visited && id != tod.root() && !known.count(id)) {
          known.emplace(id, tod.root_path(id));
        }
      }
    });
    return err;
  }

 private:
  std::unordered_map<const Tod*, std::map<NodeId, std::vector<EdgeRef>>> paths_;
};

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::string join_ids(const std::vector<std::string>& v) {
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? "," : "") + v[i];
  }
  return out + "}";
}

}  // namespace

ModeReport run_mode(const Script& script, IndexMode mode, const RunOptions& opt) {
  ModeReport rep;
  rep.mode = mode;
  rep.order = opt.order_override.value_or(script.order());
  try {
    auto sig = std::make_shared<Signature>(script.signature());
    TermBank bank(sig);
    PostOrderingIndex index(bank, rep.order, mode);
    StructureChecker checker;
    std::unordered_map<std::string, EqId> ids;
    std::vector<std::string> names;
    std::vector<GroupNames> groups;

    for (std::size_t ci = 0; ci < script.commands.size(); ++ci) {
      const auto& cmd = script.commands[ci];
      if (auto* e = std::get_if<EqCmd>(&cmd)) {
        VarNaming naming;
        Term l = bank.intern(e->lhs, naming);
        Term r = bank.intern(e->rhs, naming);
        EqId id = index.insert(l, r);
        ids[e->id] = id;
        names.resize(id + 1);
        names[id] = e->id;
        Term key = index.equality(id).lhs;
        if (std::none_of(groups.begin(), groups.end(), [key](const GroupNames& g) { return g.key == key; })) {
          groups.push_back({key, lhs_names(l, naming)});
        }
      } else if (auto* d = std::get_if<DelCmd>(&cmd)) {
        index.remove(ids.at(d->id));
      } else if (auto* q = std::get_if<QueryCmd>(&cmd)) {
        auto images = intern_bindings(bank, *q);
        QueryResult qr{q->id, {}};
        for (const auto& g : groups) {
          auto sigma = bind_names(g.names, images);
          if (!sigma) {
            continue;
          }
          for (auto id : index.query(g.key, *sigma, opt.want)) {
            qr.eqs.push_back(names[id]);
          }
          if (opt.want == Want::First && !qr.eqs.empty()) {
            break;
          }
        }
        rep.results.push_back(std::move(qr));
      } else {
        continue;
      }
      if (opt.check_structure) {
        auto err = checker.check(index);
        if (!err.empty()) {
          int line = ci < script.lines.size() ? script.lines[ci] : 0;
          throw Error(ErrorKind::Internal, "after line " + std::to_string(line) + ": " + err);
        }
      }
    }
    rep.stats = index.stats();
  } catch (const Error& e) {
    rep.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return rep;
}

RunReport run_script(const Script& script, const RunOptions& opt, std::string name) {
  RunReport rep;
  rep.name = std::move(name);
  rep.warnings = script.warnings;
  rep.modes.resize(opt.modes.size());
  const int n = static_cast<int>(opt.modes.size());
#pragma omp parallel for schedule(static) if (opt.parallel && n > 1)
  for (int i = 0; i < n; ++i) {
    rep.modes[i] = run_mode(script, opt.modes[i], opt);
  }

  for (const auto& m : rep.modes) {
    std::unordered_map<std::string, const QueryResult*> by_id;
    for (const auto& r : m.results) {
      by_id[r.id] = &r;
    }
    for (const auto& c : script.commands) {
      auto* e = std::get_if<ExpectCmd>(&c);
      if (!e) {
        continue;
      }
      ExpectResult er;
      er.query = e->query;
      er.mode = m.mode;
      er.expected = e->ids;
      if (auto it = by_id.find(e->query); it != by_id.end()) {
        er.actual = it->second->eqs;
        er.pass = as_set(er.expected) == as_set(er.actual);
      }
      rep.expects.push_back(std::move(er));
    }
  }

  for (std::size_t i = 1; i < rep.modes.size(); ++i) {
    const auto& a = rep.modes[0];
    const auto& b = rep.modes[i];
    if (!a.error.empty() || !b.error.empty()) {
      continue;
    }
    if (a.results.size() != b.results.size()) {
      rep.divergences.push_back(std::string(to_string(a.mode)) + " and " + to_string(b.mode) +
                                " answered different numbers of queries");
      continue;
    }
    for (std::size_t q = 0; q < a.results.size(); ++q) {
      if (as_set(a.results[q].eqs) != as_set(b.results[q].eqs)) {
        rep.divergences.push_back("query " + a.results[q].id + ": " + to_string(a.mode) + " " +
                                  join_ids(a.results[q].eqs) + " vs " + to_string(b.mode) + " " +
                                  join_ids(b.results[q].eqs));
      }
    }
  }
  return rep;
}

std::string stats_csv(const std::vector<RunReport>& reports) {
  std::ostringstream os;
  os << kStatsHeader << '\n';
  for (const auto& r : reports) {
    for (const auto& m : r.modes) {
      const auto& s = m.stats;
      os << r.name << ',' << to_string(m.mode) << ',' << to_string(m.order) << ',' << s.queries << ',' << s.answers
         << ',' << s.demodulators << ',' << s.tods;
      for (const auto* arr : {&s.created, &s.processed, &s.traversed}) {
        os << ',' << (*arr)[kTypeTerm] << ',' << (*arr)[kTypeSuccess] << ',' << (*arr)[kTypePos];
      }
      os << ',' << s.naive_comparisons << '\n';
    }
  }
  return os.str();
}

namespace {

// Instantiate-and-compare answers for every query of a script, independent
// of the index.
std::vector<QueryResult> naive_results(const Script& script, OrderKind order) {
  auto sig = std::make_shared<Signature>(script.signature());
  TermBank bank(sig);
  Ordering ord(*sig, order);
  struct Eq {
    std::string id;
    Term l;
    Term r;
    bool live = true;
  };
  std::vector<Eq> eqs;
  // creation order; each group: key, names, member indices
  std::vector<std::pair<GroupNames, std::vector<std::size_t>>> groups;
  std::vector<QueryResult> out;
  for (const auto& cmd : script.commands) {
    if (auto* e = std::get_if<EqCmd>(&cmd)) {
      VarNaming naming;
      Term l = bank.intern(e->lhs, naming);
      Term r = bank.intern(e->rhs, naming);
      Term key = canonicalize(bank, l, r).first;
      auto it = std::find_if(groups.begin(), groups.end(), [key](const auto& g) { return g.first.key == key; });
      if (it == groups.end()) {
        groups.push_back({{key, lhs_names(l, naming)}, {}});
        it = groups.end() - 1;
      }
      it->second.push_back(eqs.size());
      eqs.push_back({e->id, l, r});
    } else if (auto* d = std::get_if<DelCmd>(&cmd)) {
      for (auto& e : eqs) {
        if (e.id == d->id) {
          e.live = false;
        }
      }
    } else if (auto* q = std::get_if<QueryCmd>(&cmd)) {
      auto images = intern_bindings(bank, *q);
      QueryResult qr{q->id, {}};
      for (const auto& [g, members] : groups) {
        auto sigma = bind_names(g.names, images);
        if (!sigma) {
          continue;
        }
        for (auto m : members) {
          const auto& e = eqs[m];
          if (e.live && ord.compare(apply(bank, e.l, *sigma), apply(bank, e.r, *sigma)) == Cmp3::Greater) {
            qr.eqs.push_back(e.id);
          }
        }
      }
      out.push_back(std::move(qr));
    }
  }
  return out;
}

}  // namespace

ScenarioOutcome run_scenario(const GenParams& params, bool check_structure) {
  ScenarioOutcome out;
  out.seed = params.seed;
  try {
    Script script = gen_random_script(params);
    out.order = script.order();
    RunOptions opt;
    opt.modes = {IndexMode::Off, IndexMode::PerEquality, IndexMode::SharedByLhs};
    opt.check_structure = check_structure;
    opt.parallel = false;
    auto rep = run_script(script, opt, "seed" + std::to_string(params.seed));
    for (const auto& m : rep.modes) {
      if (!m.error.empty()) {
        out.ok = false;
        out.message = std::string(to_string(m.mode)) + ": " + m.error;
        return out;
      }
    }
    if (!rep.divergences.empty()) {
      out.ok = false;
      out.message = rep.divergences.front();
      return out;
    }
    auto oracle = naive_results(script, out.order);
    const auto& got = rep.modes.front().results;
    out.queries = oracle.size();
    for (std::size_t q = 0; q < oracle.size(); ++q) {
      if (q >= got.size() || as_set(oracle[q].eqs) != as_set(got[q].eqs)) {
        out.ok = false;
        out.message = "query " + oracle[q].id + ": oracle " + join_ids(oracle[q].eqs) + " vs " +
                      (q < got.size() ? join_ids(got[q].eqs) : std::string("nothing"));
        return out;
      }
    }
  } catch (const Error& e) {
    out.ok = false;
    out.message = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return out;
}

std::vector<ScenarioOutcome> run_batch_serial(const std::vector<GenParams>& params, bool check_structure) {
  std::vector<ScenarioOutcome> out;
  out.reserve(params.size());
  for (const auto& p : params) {
    out.push_back(run_scenario(p, check_structure));
  }
  return out;
}

std::vector<ScenarioOutcome> run_batch_parallel(const std::vector<GenParams>& params, bool check_structure) {
  std::vector<ScenarioOutcome> out(params.size());
  const auto n = static_cast<std::int64_t>(params.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = run_scenario(params[i], check_structure);
  }
  return out;
}

// Benchmarks

namespace {

RawTerm random_ground(std::mt19937_64& rng, const std::vector<std::pair<std::string, unsigned>>& syms,
                      unsigned depth) {
  std::vector<std::pair<std::string, unsigned>> pick;
  for (const auto& s : syms) {
    if (depth > 0 || s.second == 0) {
      pick.push_back(s);
    }
  }
  const auto& [name, ar] = pick[std::uniform_int_distribution<std::size_t>(0, pick.size() - 1)(rng)];
  RawTerm t{name, {}};
  for (unsigned i = 0; i < ar; ++i) {
    t.args.push_back(random_ground(rng, syms, depth - 1));
  }
  return t;
}

}  // namespace

Script bench_script(const std::string& family, unsigned n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Script s;
  std::vector<std::pair<std::string, unsigned>> syms;
  auto add_sym = [&](const std::string& name, unsigned ar, std::int64_t w, std::int64_t p) {
    s.commands.emplace_back(SigDecl{name, ar, w, p});
    syms.emplace_back(name, ar);
  };
  std::vector<std::string> vars;
  if (family == "swap") {
    add_sym("f", 2, 1, 4);
    add_sym("g", 1, 1, 3);
    add_sym("a", 0, 1, 2);
    add_sym("b", 0, 1, 1);
    s.commands.emplace_back(OrderDecl{OrderKind::KBO});
    s.commands.emplace_back(EqCmd{"e1", parse_raw_term("f(x,y)"), parse_raw_term("f(y,x)")});
    s.commands.emplace_back(EqCmd{"e2", parse_raw_term("f(x,y)"), parse_raw_term("f(x,x)")});
    vars = {"x", "y"};
  } else if (family == "poly") {
    add_sym("f", 2, 1, 9);
    add_sym("g", 1, 2, 8);
    add_sym("h", 3, 1, 7);
    add_sym("a", 0, 1, 6);
    add_sym("b", 0, 3, 5);
    s.commands.emplace_back(OrderDecl{OrderKind::KBO});
    auto sig = std::make_shared<Signature>(s.signature());
    TermBank bank(sig);
    Ordering ord(*sig, OrderKind::KBO);
    const std::vector<std::string> lhss{"h(x,y,z)", "f(g(x),f(y,z))", "h(x,g(y),f(z,x))"};
    const std::vector<std::string> shapes{"h(A,B,C)", "f(A,B)",  "f(g(A),f(B,C))", "g(f(A,B))",
                                          "h(A,g(B),C)", "f(f(A,B),C)", "g(g(A))",   "h(A,B,f(C,A))"};
    vars = {"x", "y", "z"};
    unsigned id = 0;
    for (const auto& lhs : lhss) {
      RawTerm l = parse_raw_term(lhs);
      unsigned made = 0;
      for (int attempt = 0; attempt < 400 && made < 5; ++attempt) {
        std::string shape = shapes[std::uniform_int_distribution<std::size_t>(0, shapes.size() - 1)(rng)];
        for (char hole : {'A', 'B', 'C'}) {
          std::string v = vars[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
          for (std::size_t p; (p = shape.find(hole)) != std::string::npos;) {
            shape.replace(p, 1, v);
          }
        }
        RawTerm r = parse_raw_term(shape);
        VarNaming naming;
        Term tl = bank.intern(l, naming);
        Term tr = bank.intern(r, naming);
        std::vector<VarId> lv;
        std::vector<VarId> rv;
        collect_vars(tl, lv);
        collect_vars(tr, rv);
        bool subset = std::all_of(rv.begin(), rv.end(), [&lv](VarId v) {
          return std::find(lv.begin(), lv.end(), v) != lv.end();
        });
        bool unordered = ord.compare(tl, tr) != Cmp3::Greater && ord.compare(tr, tl) != Cmp3::Greater;
        bool fresh = std::none_of(s.commands.begin(), s.commands.end(), [&](const Command& c) {
          auto* e = std::get_if<EqCmd>(&c);
          return e && e->lhs == l && e->rhs == r;
        });
        if (subset && unordered && fresh) {
          s.commands.emplace_back(EqCmd{"e" + std::to_string(++id), l, r});
          ++made;
        }
      }
    }
  } else {
    throw Error(ErrorKind::Precondition, "unknown bench family '" + family + "'");
  }
  std::bernoulli_distribution same(0.15);
  std::uniform_int_distribution<unsigned> depth(0, 3);
  for (unsigned q = 0; q < n; ++q) {
    QueryCmd qc;
    qc.id = "q" + std::to_string(q + 1);
    for (const auto& v : vars) {
      if (!qc.bindings.empty() && same(rng)) {
        qc.bindings.emplace_back(v, qc.bindings.front().second);
      } else {
        qc.bindings.emplace_back(v, random_ground(rng, syms, depth(rng)));
      }
    }
    s.commands.emplace_back(std::move(qc));
  }
  return parse_script(print_script(s));
}

}  // namespace todx
