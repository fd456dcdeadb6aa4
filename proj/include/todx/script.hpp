#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "todx/ordering.hpp"
#include "todx/terms.hpp"

namespace todx {

struct SigDecl {
  std::string name;
  unsigned arity = 0;
  std::optional<std::int64_t> weight;
  std::int64_t precedence = 0;
  friend bool operator==(const SigDecl&, const SigDecl&) = default;
};

struct OrderDecl {
  OrderKind kind = OrderKind::KBO;
  friend bool operator==(const OrderDecl&, const OrderDecl&) = default;
};

struct EqCmd {
  std::string id;
  RawTerm lhs;
  RawTerm rhs;
  friend bool operator==(const EqCmd&, const EqCmd&) = default;
};

struct DelCmd {
  std::string id;
  friend bool operator==(const DelCmd&, const DelCmd&) = default;
};

struct QueryCmd {
  std::string id;
  std::vector<std::pair<std::string, RawTerm>> bindings;
  friend bool operator==(const QueryCmd&, const QueryCmd&) = default;
};

struct ExpectCmd {
  std::string query;
  std::vector<std::string> ids;
  friend bool operator==(const ExpectCmd&, const ExpectCmd&) = default;
};

using Command = std::variant<SigDecl, OrderDecl, EqCmd, DelCmd, QueryCmd, ExpectCmd>;

/// A parsed script. Line numbers and warnings do not take part in equality.
struct Script {
  std::vector<Command> commands;
  std::vector<int> lines;
  std::vector<std::string> warnings;

  OrderKind order() const;
  Signature signature() const;

  friend bool operator==(const Script& a, const Script& b) { return a.commands == b.commands; }
};

/// Line-based grammar:
///   sig NAME/ARITY [w=INT] p=INT
///   ord kbo|lpo
///   eq ID: TERM = TERM
///   del ID
///   query ID: VAR:=TERM(, VAR:=TERM)*
///   expect QUERYID: {ID(,ID)*} | {}
/// `#` starts a comment. Identifiers without arguments that are not declared
/// symbols are variables.
Script parse_script(std::string_view text);

std::string print_script(const Script& s);

/// A single term in script syntax, e.g. "f(g(x),a)".
RawTerm parse_raw_term(std::string_view text);

/// Random script generation for property runs.
struct GenParams {
  std::uint64_t seed = 0;
  unsigned symbols = 4;       // <= 5
  unsigned max_arity = 2;     // <= 3
  unsigned depth = 3;         // <= 4
  unsigned vars = 3;          // equality variables x0..
  unsigned groups = 2;        // distinct left-hand sides
  unsigned per_group = 4;     // <= 6
  unsigned equalities = 12;   // <= 30
  unsigned queries = 40;      // <= 200
  double delete_prob = 0.1;
  std::optional<OrderKind> order;  // random when unset
};

Script gen_random_script(const GenParams& p);

}  // namespace todx
