#include "todx/script.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace todx {

OrderKind Script::order() const {
  for (const auto& c : commands) {
    if (auto* o = std::get_if<OrderDecl>(&c)) {
      return o->kind;
    }
  }
  return OrderKind::KBO;
}

Signature Script::signature() const {
  Signature sig;
  for (const auto& c : commands) {
    if (auto* s = std::get_if<SigDecl>(&c)) {
      sig.add(s->name, s->arity, s->weight.value_or(1), s->precedence);
    }
  }
  sig.validate();
  return sig;
}

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineParser {
 public:
  LineParser(std::string_view text, int line) : text_(text), line_(line) {}

  [[noreturn]] void fail(ErrorKind kind, const std::string& what) const { fail_at(kind, what, pos_); }
  [[noreturn]] void fail_at(ErrorKind kind, const std::string& what, std::size_t pos) const {
    throw ParseError(kind, what, line_, static_cast<int>(pos) + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }
  // Start of the next token.
  std::size_t pos() {
    skip_ws();
    return pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) {
      fail(ErrorKind::Syntax, "expected '" + std::string(tok) + "'");
    }
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) {
      ++pos_;
    }
    if (start == pos_) {
      fail(ErrorKind::Syntax, "expected an identifier");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      ++pos_;
    }
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    auto digits = text_.substr(start, pos_ - start);
    if (digits.empty() || digits == "-") {
      fail_at(ErrorKind::Syntax, "expected an integer", start);
    }
    try {
      return std::stoll(std::string(digits));
    } catch (const std::out_of_range&) {
      fail_at(ErrorKind::Syntax, "integer out of range", start);
    }
  }

  RawTerm term() {
    RawTerm t;
    t.name = ident();
    if (accept("(")) {
      do {
        t.args.push_back(term());
      } while (accept(","));
      expect(")");
    }
    return t;
  }

 private:
  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

struct SymInfo {
  unsigned arity;
};

// Checks symbol use in a parsed term; `pos` locates the term for messages.
void check_term(const LineParser& lp, std::size_t pos, const RawTerm& t, const std::map<std::string, SymInfo>& syms) {
  auto it = syms.find(t.name);
  if (it == syms.end()) {
    if (!t.args.empty()) {
      lp.fail_at(ErrorKind::UnknownSymbol, "unknown symbol '" + t.name + "'", pos);
    }
    return;
  }
  if (it->second.arity != t.args.size()) {
    lp.fail_at(ErrorKind::Arity,
               "symbol '" + t.name + "' expects " + std::to_string(it->second.arity) + " arguments, got " +
                   std::to_string(t.args.size()),
               pos);
  }
  for (const auto& a : t.args) {
    check_term(lp, pos, a, syms);
  }
}

}  // namespace

Script parse_script(std::string_view text) {
  Script script;
  std::map<std::string, SymInfo> syms;
  Signature sig;
  bool seen_terms = false;
  bool have_order = false;
  bool weights_given = false;
  std::set<std::string> eq_ids;
  std::set<std::string> query_ids;
  int line_no = 0;

  auto begin_terms = [&](const LineParser& lp) {
    if (!seen_terms) {
      seen_terms = true;
      try {
        sig.validate();
      } catch (const Error& e) {
        lp.fail_at(e.kind(), e.what(), 0);
      }
    }
  };

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    LineParser lp(line, line_no);
    if (lp.at_end()) {
      if (end == text.size()) {
        break;
      }
      continue;
    }
    std::size_t kw_pos = lp.pos();
    auto kw = lp.ident();
    if (kw == "sig") {
      if (seen_terms) {
        lp.fail_at(ErrorKind::Syntax, "sig must precede equalities and queries", kw_pos);
      }
      SigDecl d;
      std::size_t name_pos = lp.pos();
      d.name = lp.ident();
      lp.expect("/");
      auto ar = lp.integer();
      if (ar < 0) {
        lp.fail(ErrorKind::Syntax, "arity must be non-negative");
      }
      d.arity = static_cast<unsigned>(ar);
      bool have_p = false;
      while (!lp.at_end()) {
        std::size_t attr_pos = lp.pos();
        auto key = lp.ident();
        lp.expect("=");
        auto v = lp.integer();
        if (key == "w" && !d.weight) {
          d.weight = v;
        } else if (key == "p" && !have_p) {
          if (v < 0) {
            lp.fail_at(ErrorKind::InvalidSignature, "precedence must be non-negative", attr_pos);
          }
          d.precedence = v;
          have_p = true;
        } else {
          lp.fail_at(ErrorKind::Syntax, "unexpected attribute '" + key + "'", attr_pos);
        }
      }
      if (!have_p) {
        lp.fail(ErrorKind::Syntax, "missing precedence p=INT");
      }
      try {
        sig.add(d.name, d.arity, d.weight.value_or(1), d.precedence);
      } catch (const Error& e) {
        lp.fail_at(e.kind(), e.what(), name_pos);
      }
      weights_given = weights_given || d.weight.has_value();
      syms[d.name] = {d.arity};
      script.commands.emplace_back(std::move(d));
    } else if (kw == "ord") {
      if (have_order) {
        lp.fail_at(ErrorKind::Syntax, "ord given twice", kw_pos);
      }
      auto k = lp.ident();
      if (k == "kbo") {
        script.commands.emplace_back(OrderDecl{OrderKind::KBO});
      } else if (k == "lpo") {
        script.commands.emplace_back(OrderDecl{OrderKind::LPO});
      } else {
        lp.fail(ErrorKind::Syntax, "expected kbo or lpo");
      }
      have_order = true;
    } else if (kw == "eq") {
      begin_terms(lp);
      std::size_t id_pos = lp.pos();
      EqCmd c;
      c.id = lp.ident();
      if (!eq_ids.insert(c.id).second) {
        lp.fail_at(ErrorKind::DuplicateId, "equality id '" + c.id + "' used twice", id_pos);
      }
      lp.expect(":");
      std::size_t lpos = lp.pos();
      c.lhs = lp.term();
      check_term(lp, lpos, c.lhs, syms);
      lp.expect("=");
      std::size_t rpos = lp.pos();
      c.rhs = lp.term();
      check_term(lp, rpos, c.rhs, syms);
      script.commands.emplace_back(std::move(c));
    } else if (kw == "del") {
      begin_terms(lp);
      std::size_t id_pos = lp.pos();
      DelCmd c{lp.ident()};
      if (!eq_ids.count(c.id)) {
        lp.fail_at(ErrorKind::UnknownId, "unknown equality id '" + c.id + "'", id_pos);
      }
      script.commands.emplace_back(std::move(c));
    } else if (kw == "query") {
      begin_terms(lp);
      std::size_t id_pos = lp.pos();
      QueryCmd c;
      c.id = lp.ident();
      if (!query_ids.insert(c.id).second) {
        lp.fail_at(ErrorKind::DuplicateId, "query id '" + c.id + "' used twice", id_pos);
      }
      lp.expect(":");
      do {
        std::size_t vpos = lp.pos();
        auto var = lp.ident();
        if (syms.count(var)) {
          lp.fail_at(ErrorKind::Syntax, "'" + var + "' is a symbol, not a variable", vpos);
        }
        for (const auto& [v, _] : c.bindings) {
          if (v == var) {
            lp.fail_at(ErrorKind::Syntax, "variable '" + var + "' bound twice", vpos);
          }
        }
        lp.expect(":=");
        std::size_t tpos = lp.pos();
        auto t = lp.term();
        check_term(lp, tpos, t, syms);
        c.bindings.emplace_back(std::move(var), std::move(t));
      } while (lp.accept(","));
      script.commands.emplace_back(std::move(c));
    } else if (kw == "expect") {
      begin_terms(lp);
      std::size_t id_pos = lp.pos();
      ExpectCmd c;
      c.query = lp.ident();
      if (!query_ids.count(c.query)) {
        lp.fail_at(ErrorKind::UnknownId, "unknown query id '" + c.query + "'", id_pos);
      }
      lp.expect(":");
      lp.expect("{");
      if (!lp.accept("}")) {
        do {
          std::size_t epos = lp.pos();
          auto id = lp.ident();
          if (!eq_ids.count(id)) {
            lp.fail_at(ErrorKind::UnknownId, "unknown equality id '" + id + "'", epos);
          }
          c.ids.push_back(std::move(id));
        } while (lp.accept(","));
        lp.expect("}");
      }
      script.commands.emplace_back(std::move(c));
    } else {
      lp.fail_at(ErrorKind::Syntax, "unknown command '" + kw + "'", kw_pos);
    }
    if (!lp.at_end()) {
      lp.fail(ErrorKind::Syntax, "trailing input");
    }
    script.lines.push_back(line_no);
    if (end == text.size()) {
      break;
    }
  }
  if (!have_order) {
    throw ParseError(ErrorKind::Syntax, "missing ord line", line_no, 1);
  }
  if (!seen_terms) {
    try {
      sig.validate();
    } catch (const Error& e) {
      throw ParseError(e.kind(), e.what(), line_no, 1);
    }
  }
  if (weights_given && script.order() == OrderKind::LPO) {
    script.warnings.push_back("ord lpo: symbol weights are ignored");
  }
  return script;
}

RawTerm parse_raw_term(std::string_view text) {
  LineParser lp(text, 1);
  RawTerm t = lp.term();
  if (!lp.at_end()) {
    lp.fail(ErrorKind::Syntax, "trailing input");
  }
  return t;
}

std::string print_script(const Script& s) {
  std::ostringstream os;
  for (const auto& c : s.commands) {
    std::visit(
        [&os](const auto& cmd) {
          using T = std::decay_t<decltype(cmd)>;
          if constexpr (std::is_same_v<T, SigDecl>) {
            os << "sig " << cmd.name << '/' << cmd.arity;
            if (cmd.weight) {
              os << " w=" << *cmd.weight;
            }
            os << " p=" << cmd.precedence;
          } else if constexpr (std::is_same_v<T, OrderDecl>) {
            os << "ord " << to_string(cmd.kind);
          } else if constexpr (std::is_same_v<T, EqCmd>) {
            os << "eq " << cmd.id << ": " << cmd.lhs.to_string() << " = " << cmd.rhs.to_string();
          } else if constexpr (std::is_same_v<T, DelCmd>) {
            os << "del " << cmd.id;
          } else if constexpr (std::is_same_v<T, QueryCmd>) {
            os << "query " << cmd.id << ':';
            for (std::size_t i = 0; i < cmd.bindings.size(); ++i) {
              os << (i ? ", " : " ") << cmd.bindings[i].first << ":=" << cmd.bindings[i].second.to_string();
            }
          } else {
            os << "expect " << cmd.query << ": {";
            for (std::size_t i = 0; i < cmd.ids.size(); ++i) {
              os << (i ? "," : "") << cmd.ids[i];
            }
            os << '}';
          }
          os << '\n';
        },
        c);
  }
  return os.str();
}

// Generator

namespace {

class Gen {
 public:
  explicit Gen(const GenParams& p) : p_(p), rng_(p.seed) {
    p_.symbols = std::clamp(p_.symbols, 2u, 5u);
    p_.max_arity = std::clamp(p_.max_arity, 1u, 3u);
    p_.depth = std::clamp(p_.depth, 1u, 4u);
    p_.vars = std::clamp(p_.vars, 1u, 4u);
    p_.groups = std::max(p_.groups, 1u);
    p_.per_group = std::clamp(p_.per_group, 1u, 6u);
    p_.equalities = std::min(p_.equalities, 30u);
    p_.queries = std::min(p_.queries, 200u);
  }

  Script run() {
    Script s;
    order_ = p_.order ? *p_.order : (coin(0.5) ? OrderKind::KBO : OrderKind::LPO);
    make_signature(s);
    s.commands.emplace_back(OrderDecl{order_});
    std::vector<RawTerm> lhss;
    for (unsigned g = 0; g < p_.groups; ++g) {
      lhss.push_back(make_lhs());
    }
    std::vector<unsigned> inserted(lhss.size(), 0);
    // live equalities: id, printed (lhs, rhs)
    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> live;
    unsigned eqs = 0;
    unsigned queries = 0;
    while (eqs < p_.equalities || queries < p_.queries) {
      unsigned eq_left = p_.equalities - eqs;
      unsigned q_left = p_.queries - queries;
      bool want_eq = eq_left > 0 && uniform(0, eq_left + q_left - 1) < eq_left;
      bool did = false;
      if (want_eq) {
        std::vector<std::size_t> open;
        for (std::size_t g = 0; g < lhss.size(); ++g) {
          if (inserted[g] < p_.per_group) {
            open.push_back(g);
          }
        }
        if (open.empty()) {
          eqs = p_.equalities;
        } else {
          auto g = open[uniform(0, static_cast<unsigned>(open.size()) - 1)];
          for (int attempt = 0; attempt < 20 && !did; ++attempt) {
            RawTerm r = make_rhs(lhss[g]);
            auto key = std::make_pair(lhss[g].to_string(), r.to_string());
            if (key.first == key.second ||
                std::any_of(live.begin(), live.end(), [&key](const auto& e) { return e.second == key; })) {
              continue;
            }
            std::string id = "e" + std::to_string(++eq_counter_);
            s.commands.emplace_back(EqCmd{id, lhss[g], r});
            live.emplace_back(id, key);
            ++inserted[g];
            did = true;
          }
          ++eqs;
        }
      } else if (q_left > 0) {
        s.commands.emplace_back(make_query());
        ++queries;
        did = true;
      }
      if (did && !live.empty() && coin(p_.delete_prob)) {
        auto i = uniform(0, static_cast<unsigned>(live.size()) - 1);
        s.commands.emplace_back(DelCmd{live[i].first});
        live.erase(live.begin() + i);
      }
    }
    return s;
  }

 private:
  bool coin(double prob) { return std::uniform_real_distribution<double>(0, 1)(rng_) < prob; }
  unsigned uniform(unsigned lo, unsigned hi) { return std::uniform_int_distribution<unsigned>(lo, hi)(rng_); }

  void make_signature(Script& s) {
    static const char* consts[] = {"a", "b", "c", "d", "e"};
    static const char* funcs[] = {"f", "g", "h", "k", "m"};
    std::vector<std::int64_t> prec(p_.symbols);
    for (unsigned i = 0; i < p_.symbols; ++i) {
      prec[i] = i + 1;
    }
    std::shuffle(prec.begin(), prec.end(), rng_);
    unsigned nc = 0;
    unsigned nf = 0;
    for (unsigned i = 0; i < p_.symbols; ++i) {
      unsigned ar = i == 0 ? 0 : i == 1 ? uniform(1, p_.max_arity) : uniform(0, p_.max_arity);
      SigDecl d;
      d.name = ar == 0 ? consts[nc++] : funcs[nf++];
      d.arity = ar;
      if (order_ == OrderKind::KBO) {
        d.weight = uniform(1, 3);
      }
      d.precedence = prec[i];
      (ar == 0 ? constants_ : functions_).push_back({d.name, ar});
      s.commands.emplace_back(std::move(d));
    }
  }

  RawTerm leaf(const std::vector<std::string>& vars, double var_prob) {
    if (!vars.empty() && coin(var_prob)) {
      return RawTerm{vars[uniform(0, static_cast<unsigned>(vars.size()) - 1)], {}};
    }
    return RawTerm{constants_[uniform(0, static_cast<unsigned>(constants_.size()) - 1)].first, {}};
  }

  RawTerm term(unsigned depth, const std::vector<std::string>& vars, double var_prob, bool compound = false) {
    if (depth == 0 || (!compound && coin(0.35))) {
      return leaf(vars, var_prob);
    }
    const auto& [name, ar] = functions_[uniform(0, static_cast<unsigned>(functions_.size()) - 1)];
    RawTerm t{name, {}};
    for (unsigned i = 0; i < ar; ++i) {
      t.args.push_back(term(depth - 1, vars, var_prob));
    }
    return t;
  }

  static void rename(RawTerm& t, std::map<std::string, std::string>& ren, const std::set<std::string>& vars) {
    if (t.args.empty() && vars.count(t.name)) {
      auto it = ren.find(t.name);
      if (it == ren.end()) {
        it = ren.emplace(t.name, "x" + std::to_string(ren.size())).first;
      }
      t.name = it->second;
      return;
    }
    for (auto& a : t.args) {
      rename(a, ren, vars);
    }
  }

  static void vars_of(const RawTerm& t, const std::set<std::string>& all, std::vector<std::string>& out) {
    if (t.args.empty() && all.count(t.name)) {
      if (std::find(out.begin(), out.end(), t.name) == out.end()) {
        out.push_back(t.name);
      }
      return;
    }
    for (const auto& a : t.args) {
      vars_of(a, all, out);
    }
  }

  std::set<std::string> var_names() const {
    std::set<std::string> out;
    for (unsigned i = 0; i < p_.vars; ++i) {
      out.insert("x" + std::to_string(i));
    }
    return out;
  }

  RawTerm make_lhs() {
    auto names = var_names();
    std::vector<std::string> vars(names.begin(), names.end());
    for (;;) {
      RawTerm t = term(uniform(1, p_.depth), vars, 0.6, true);
      std::vector<std::string> used;
      vars_of(t, names, used);
      if (used.empty()) {
        continue;
      }
      std::map<std::string, std::string> ren;
      rename(t, ren, names);
      return t;
    }
  }

  // Right-hand sides reuse the left-hand side's shape often, which is what
  // makes equalities unorientable.
  RawTerm make_rhs(const RawTerm& l) {
    auto names = var_names();
    std::vector<std::string> vars;
    vars_of(l, names, vars);
    switch (uniform(0, 3)) {
      case 0: {
        // permute variables
        auto perm = vars;
        std::shuffle(perm.begin(), perm.end(), rng_);
        std::map<std::string, std::string> ren;
        for (std::size_t i = 0; i < vars.size(); ++i) {
          ren[vars[i]] = perm[i];
        }
        if (vars.size() == 1) {
          return term(uniform(0, p_.depth), vars, 0.6);
        }
        RawTerm r = l;
        substitute(r, ren, names);
        return r;
      }
      case 1: {
        // shuffle the top-level arguments
        RawTerm r = l;
        std::shuffle(r.args.begin(), r.args.end(), rng_);
        return r;
      }
      case 2: {
        // replace a random position by a variable or a small term
        RawTerm r = l;
        RawTerm* pos = &r;
        while (!pos->args.empty() && coin(0.6)) {
          pos = &pos->args[uniform(0, static_cast<unsigned>(pos->args.size()) - 1)];
        }
        *pos = term(uniform(0, 2), vars, 0.7);
        return r;
      }
      default:
        return term(uniform(0, p_.depth), vars, 0.6);
    }
  }

  static void substitute(RawTerm& t, const std::map<std::string, std::string>& ren, const std::set<std::string>& vars) {
    if (t.args.empty() && vars.count(t.name)) {
      t.name = ren.at(t.name);
      return;
    }
    for (auto& a : t.args) {
      substitute(a, ren, vars);
    }
  }

  QueryCmd make_query() {
    QueryCmd q;
    q.id = "q" + std::to_string(++query_counter_);
    std::vector<std::string> qvars{"z0", "z1"};
    for (unsigned i = 0; i < p_.vars; ++i) {
      RawTerm img;
      if (!pool_.empty() && coin(0.35)) {
        img = pool_[uniform(0, static_cast<unsigned>(pool_.size()) - 1)];
      } else {
        img = term(uniform(0, std::min(p_.depth, 3u)), qvars, coin(0.7) ? 0.0 : 0.3);
        pool_.push_back(img);
        if (pool_.size() > 16) {
          pool_.erase(pool_.begin());
        }
      }
      q.bindings.emplace_back("x" + std::to_string(i), std::move(img));
    }
    return q;
  }

  GenParams p_;
  std::mt19937_64 rng_;
  OrderKind order_ = OrderKind::KBO;
  std::vector<std::pair<std::string, unsigned>> constants_;
  std::vector<std::pair<std::string, unsigned>> functions_;
  std::vector<RawTerm> pool_;
  unsigned eq_counter_ = 0;
  unsigned query_counter_ = 0;
};

}  // namespace

Script gen_random_script(const GenParams& p) { return parse_script(print_script(Gen(p).run())); }

}  // namespace todx
