#include "todx/terms.hpp"

#include <algorithm>
#include <sstream>

namespace todx {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Arity: return "arity";
    case ErrorKind::UnknownSymbol: return "unknown-symbol";
    case ErrorKind::InvalidSignature: return "invalid-signature";
    case ErrorKind::DuplicateId: return "duplicate-id";
    case ErrorKind::DuplicateEquality: return "duplicate-equality";
    case ErrorKind::UnknownId: return "unknown-id";
    case ErrorKind::MalformedEquality: return "malformed-equality";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::StepCap: return "step-cap";
    case ErrorKind::Internal: return "internal";
  }
  return "?";
}

// Signature

SymbolId Signature::add(std::string name, unsigned arity, std::int64_t weight, std::int64_t precedence) {
  if (by_name_.contains(name)) {
    throw Error(ErrorKind::InvalidSignature, "symbol '" + name + "' declared twice");
  }
  if (weight < 1) {
    throw Error(ErrorKind::InvalidSignature, "symbol '" + name + "' must have weight >= 1");
  }
  for (const auto& s : symbols_) {
    if (s.precedence == precedence) {
      throw Error(ErrorKind::InvalidSignature,
                  "symbols '" + s.name + "' and '" + name + "' share precedence " + std::to_string(precedence));
    }
  }
  auto id = static_cast<SymbolId>(symbols_.size());
  by_name_.emplace(name, id);
  symbols_.push_back(Symbol{id, std::move(name), arity, weight, precedence});
  return id;
}

void Signature::validate() const {
  if (std::none_of(symbols_.begin(), symbols_.end(), [](const Symbol& s) { return s.arity == 0; })) {
    throw Error(ErrorKind::InvalidSignature, "signature needs at least one constant");
  }
}

std::optional<SymbolId> Signature::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::int64_t Signature::w0() const {
  std::int64_t best = 0;
  for (const auto& s : symbols_) {
    if (s.arity == 0 && (best == 0 || s.weight < best)) {
      best = s.weight;
    }
  }
  return best;
}

// LinearExpr

std::int64_t LinearExpr::coefficient(VarId v) const {
  auto it = std::lower_bound(coeffs_.begin(), coeffs_.end(), v,
                             [](const auto& p, VarId x) { return p.first < x; });
  return (it != coeffs_.end() && it->first == v) ? it->second : 0;
}

void LinearExpr::add_var(VarId v, std::int64_t coeff) {
  if (coeff == 0) {
    return;
  }
  auto it = std::lower_bound(coeffs_.begin(), coeffs_.end(), v,
                             [](const auto& p, VarId x) { return p.first < x; });
  if (it != coeffs_.end() && it->first == v) {
    it->second += coeff;
    if (it->second == 0) {
      coeffs_.erase(it);
    }
  } else {
    coeffs_.insert(it, {v, coeff});
  }
}

void LinearExpr::add(const LinearExpr& other, std::int64_t mult) {
  constant_ += mult * other.constant_;
  if (other.coeffs_.empty() || mult == 0) {
    return;
  }
  // sorted merge
  std::vector<std::pair<VarId, std::int64_t>> merged;
  merged.reserve(coeffs_.size() + other.coeffs_.size());
  auto a = coeffs_.begin();
  auto b = other.coeffs_.begin();
  while (a != coeffs_.end() || b != other.coeffs_.end()) {
    if (b == other.coeffs_.end() || (a != coeffs_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == coeffs_.end() || b->first < a->first) {
      merged.emplace_back(b->first, mult * b->second);
      ++b;
    } else {
      auto c = a->second + mult * b->second;
      if (c != 0) {
        merged.emplace_back(a->first, c);
      }
      ++a;
      ++b;
    }
  }
  coeffs_ = std::move(merged);
}

LinearExpr LinearExpr::operator-() const {
  LinearExpr r;
  r.add(*this, -1);
  return r;
}

std::string LinearExpr::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [v, c] : coeffs_) {
    if (first) {
      out << (c < 0 ? "-" : "");
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    auto abs = c < 0 ? -c : c;
    if (abs != 1) {
      out << abs << "*";
    }
    out << "x" << v;
  }
  if (first) {
    out << constant_;
  } else if (constant_ != 0) {
    out << (constant_ < 0 ? " - " : " + ") << (constant_ < 0 ? -constant_ : constant_);
  }
  return out.str();
}

const char* to_string(Sign3 s) {
  switch (s) {
    case Sign3::Positive: return ">";
    case Sign3::NonNegative: return ">=";
    case Sign3::NotNonNegative: return "!>=";
  }
  return "?";
}

Sign3 sign(const LinearExpr& e, std::int64_t w0) {
  // A negative coefficient is unbounded below; otherwise the minimum is at |x| = w0.
  std::int64_t sum = 0;
  for (const auto& [v, c] : e.coefficients()) {
    if (c < 0) {
      return Sign3::NotNonNegative;
    }
    sum += c;
  }
  auto min = e.constant() + w0 * sum;
  if (min > 0) {
    return Sign3::Positive;
  }
  return min == 0 ? Sign3::NonNegative : Sign3::NotNonNegative;
}

// Term

bool Term::is_var() const { return node_->is_var; }
VarId Term::var() const { return node_->var; }
SymbolId Term::symbol() const { return node_->symbol; }
std::span<const Term> Term::args() const { return node_->args; }
bool Term::ground() const { return node_->ground; }
std::size_t Term::hash() const { return node_->hash; }
std::size_t Term::size() const { return node_->size; }
std::size_t Term::depth() const { return node_->depth; }
std::uint32_t Term::serial() const { return node_->serial; }

std::string RawTerm::to_string() const {
  if (args.empty()) {
    return name;
  }
  std::string out = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) {
      out += ",";
    }
    out += args[i].to_string();
  }
  return out + ")";
}

VarId VarNaming::get(const std::string& name) {
  auto [it, inserted] = ids_.try_emplace(name, base_ + static_cast<VarId>(names_.size()));
  if (inserted) {
    names_.push_back(name);
  }
  return it->second;
}

std::optional<VarId> VarNaming::find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) {
    return std::nullopt;
  }
  return it->second;
}

// TermBank

std::size_t TermBank::KeyHash::operator()(const Key& k) const {
  std::size_t h = k.is_var ? 0x9e3779b97f4a7c15ull ^ k.var : std::hash<SymbolId>{}(k.symbol) * 31 + 7;
  for (auto* a : k.args) {
    h = h * 1000003u ^ a->hash;
  }
  return h;
}

TermBank::TermBank(std::shared_ptr<const Signature> sig) : sig_(std::move(sig)) {}

Term TermBank::insert(Key key, std::vector<Term> args) {
  auto h = KeyHash{}(key);
  if (auto it = table_.find(key); it != table_.end()) {
    return Term(it->second);
  }
  auto& node = nodes_.emplace_back();
  node.is_var = key.is_var;
  node.var = key.var;
  node.symbol = key.symbol;
  node.hash = h;
  node.serial = static_cast<std::uint32_t>(nodes_.size() - 1);
  node.ground = !key.is_var;
  node.size = 1;
  node.depth = 0;
  for (auto a : args) {
    node.ground = node.ground && a.ground();
    node.size += a.size();
    node.depth = std::max(node.depth, a.depth() + 1);
  }
  node.args = std::move(args);
  table_.emplace(std::move(key), &node);
  return Term(&node);
}

Term TermBank::var(VarId v) { return insert(Key{true, v, 0, {}}, {}); }

Term TermBank::app(SymbolId f, std::span<const Term> args) {
  const auto& sym = sig_->symbol(f);
  if (sym.arity != args.size()) {
    throw Error(ErrorKind::Arity, "symbol '" + sym.name + "' expects " + std::to_string(sym.arity) +
                                      " arguments, got " + std::to_string(args.size()));
  }
  Key key{false, 0, f, {}};
  key.args.reserve(args.size());
  for (auto a : args) {
    key.args.push_back(a.node());
  }
  return insert(std::move(key), std::vector<Term>(args.begin(), args.end()));
}

Term TermBank::app(std::string_view name, std::initializer_list<Term> args) {
  auto f = sig_->find(name);
  if (!f) {
    throw Error(ErrorKind::UnknownSymbol, "unknown symbol '" + std::string(name) + "'");
  }
  return app(*f, args);
}

Term TermBank::intern(const RawTerm& raw, VarNaming& vars) {
  auto f = sig_->find(raw.name);
  if (!f) {
    if (!raw.args.empty()) {
      throw Error(ErrorKind::UnknownSymbol, "unknown symbol '" + raw.name + "'");
    }
    return var(vars.get(raw.name));
  }
  std::vector<Term> args;
  args.reserve(raw.args.size());
  for (const auto& a : raw.args) {
    args.push_back(intern(a, vars));
  }
  return app(*f, args);
}

// Substitution

void Substitution::bind(VarId v, Term t) {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                             [](const auto& p, VarId x) { return p.first < x; });
  bool self = t.is_var() && t.var() == v;
  if (it != bindings_.end() && it->first == v) {
    if (self) {
      bindings_.erase(it);
    } else {
      it->second = t;
    }
  } else if (!self) {
    bindings_.insert(it, {v, t});
  }
}

Term Substitution::find(VarId v) const {
  for (const auto& [x, t] : bindings_) {
    if (x == v) {
      return t;
    }
    if (x > v) {
      break;
    }
  }
  return Term();
}

Term apply(TermBank& bank, Term t, const Substitution& subst) {
  if (subst.empty() || t.ground()) {
    return t;
  }
  if (t.is_var()) {
    auto img = subst.find(t.var());
    return img ? img : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (auto a : t.args()) {
    auto b = apply(bank, a, subst);
    changed = changed || b != a;
    args.push_back(b);
  }
  return changed ? bank.app(t.symbol(), args) : t;
}

std::size_t occurrences(Term t, SymbolId f) {
  if (t.is_var()) {
    return 0;
  }
  std::size_t n = t.symbol() == f ? 1 : 0;
  for (auto a : t.args()) {
    n += occurrences(a, f);
  }
  return n;
}

std::size_t var_occurrences(Term t, VarId v) {
  if (t.is_var()) {
    return t.var() == v ? 1 : 0;
  }
  if (t.ground()) {
    return 0;
  }
  std::size_t n = 0;
  for (auto a : t.args()) {
    n += var_occurrences(a, v);
  }
  return n;
}

namespace {
void add_weight(const Signature& sig, Term t, LinearExpr& acc) {
  if (t.is_var()) {
    acc.add_var(t.var(), 1);
    return;
  }
  acc.add_constant(sig.weight(t.symbol()));
  for (auto a : t.args()) {
    add_weight(sig, a, acc);
  }
}
}  // namespace

LinearExpr weight(const Signature& sig, Term t) {
  LinearExpr e;
  add_weight(sig, t, e);
  return e;
}

LinearExpr subst_linear(const Signature& sig, const Substitution& subst, const LinearExpr& e) {
  LinearExpr r(e.constant());
  for (const auto& [v, c] : e.coefficients()) {
    auto img = subst.find(v);
    if (img) {
      r.add(weight(sig, img), c);
    } else {
      r.add_var(v, c);
    }
  }
  return r;
}

void collect_vars(Term t, std::vector<VarId>& out) {
  if (t.ground()) {
    return;
  }
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.var()) == out.end()) {
      out.push_back(t.var());
    }
    return;
  }
  for (auto a : t.args()) {
    collect_vars(a, out);
  }
}

bool contains_var(Term t, VarId v) {
  if (t.ground()) {
    return false;
  }
  if (t.is_var()) {
    return t.var() == v;
  }
  for (auto a : t.args()) {
    if (contains_var(a, v)) {
      return true;
    }
  }
  return false;
}

bool is_subterm(Term sub, Term t) {
  if (sub == t) {
    return true;
  }
  if (t.is_var() || sub.size() >= t.size()) {
    return false;
  }
  for (auto a : t.args()) {
    if (is_subterm(sub, a)) {
      return true;
    }
  }
  return false;
}

std::string to_string(const Signature& sig, Term t, const std::function<std::string(VarId)>& var_name) {
  if (t.is_null()) {
    return "<null>";
  }
  if (t.is_var()) {
    if (var_name) {
      return var_name(t.var());
    }
    if (t.var() >= kQueryVarBase) {
      return "z" + std::to_string(t.var() - kQueryVarBase);
    }
    return "x" + std::to_string(t.var());
  }
  std::string out = sig.symbol(t.symbol()).name;
  if (t.arity() == 0) {
    return out;
  }
  out += "(";
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) {
      out += ",";
    }
    out += to_string(sig, t.arg(i), var_name);
  }
  return out + ")";
}

}  // namespace todx
