#include <doctest.h>

#include <set>
#include <sstream>

#include "todx/runner.hpp"
#include "todx/script.hpp"

using namespace todx;

namespace {

const char* kSwapScript = R"(sig f/2 w=1 p=2
sig a/0 w=1 p=1
ord kbo
eq e1: f(x,y) = f(y,x)
query q1: x:=a, y:=a
expect q1: {}
eq e2: f(x,y) = f(x,x)
query q2: x:=f(a,a), y:=a
expect q2: {e1}
)";

const std::vector<IndexMode> kAll{IndexMode::Off, IndexMode::PerEquality, IndexMode::SharedByLhs};

ErrorKind parse_error_kind(const std::string& text, int* line = nullptr, int* column = nullptr) {
  try {
    parse_script(text);
  } catch (const ParseError& e) {
    if (line) *line = e.line();
    if (column) *column = e.column();
    return e.kind();
  }
  FAIL("script parsed: " << text);
  return ErrorKind::Internal;
}

std::vector<std::string> csv_row(const std::string& csv, std::size_t row) {
  std::istringstream in(csv);
  std::string line;
  for (std::size_t i = 0; i <= row; ++i) {
    std::getline(in, line);
  }
  std::vector<std::string> cells;
  std::istringstream ls(line);
  std::string cell;
  while (std::getline(ls, cell, ',')) {
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace

TEST_CASE("parse a small script") {
  auto s = parse_script("sig f/2 w=1 p=2 \n sig a/0 w=1 p=1 \n ord kbo \n eq e1: f(x,y) = f(y,x) \n query q1: x:=a, y:=a");
  REQUIRE(s.commands.size() == 5);
  CHECK(s.order() == OrderKind::KBO);
  CHECK(s.signature().size() == 2);
  auto& eq = std::get<EqCmd>(s.commands[3]);
  CHECK(eq.lhs.to_string() == "f(x,y)");
  CHECK(s.warnings.empty());
  auto& q = std::get<QueryCmd>(s.commands[4]);
  CHECK(q.bindings.size() == 2);
}

TEST_CASE("weights under LPO draw a warning") {
  auto s = parse_script("sig f/2 w=3 p=2\nsig a/0 p=1\nord lpo\n");
  CHECK(s.order() == OrderKind::LPO);
  CHECK(s.warnings.size() == 1);
}

TEST_CASE("parse errors carry a position") {
  int line = 0, col = 0;
  CHECK(parse_error_kind("sig a/0 p=1\n", &line) == ErrorKind::Syntax);
  CHECK(parse_error_kind("sig f/2 p=2\nsig a/0 p=1\nord kbo\neq e1: f(x) = x\n", &line, &col) == ErrorKind::Arity);
  CHECK(line == 4);
  CHECK(col == 8);
  CHECK(parse_error_kind("sig a/0 p=1\nord kbo\neq e1: h(x) = x\n", &line) == ErrorKind::UnknownSymbol);
  CHECK(line == 3);
  CHECK(parse_error_kind("sig a/0 p=1\nord kbo\neq e1: a = x\neq e1: x = a\n", &line) == ErrorKind::DuplicateId);
  CHECK(line == 4);
  CHECK(parse_error_kind("sig a/0 p=1\nord kbo\ndel e9\n") == ErrorKind::UnknownId);
  CHECK(parse_error_kind("sig a/0 p=1\nord kbo\nquery q: x:=a\nexpect q: {e1}\n") == ErrorKind::UnknownId);
  CHECK(parse_error_kind("sig a/0 p=1\nord kbo\nquery q: a:=a\n") == ErrorKind::Syntax);
  CHECK(parse_error_kind("sig a/0 p=1\nord kbo\neq e: a = a\nsig b/0 p=2\n") == ErrorKind::Syntax);
  CHECK(parse_error_kind("sig a/0 w=0 p=1\nord kbo\n") == ErrorKind::InvalidSignature);
  CHECK(parse_error_kind("sig f/1 p=1\nord kbo\n") == ErrorKind::InvalidSignature);
  CHECK(parse_error_kind("sig a/0 p=1\nord kbo\neq e: a = a junk\n") == ErrorKind::Syntax);
  CHECK(parse_error_kind("sig a/0 p=1\nord rpo\n") == ErrorKind::Syntax);
}

TEST_CASE("generated scripts round-trip and are reproducible") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    GenParams p;
    p.seed = seed;
    p.symbols = 2 + seed % 4;
    p.max_arity = 1 + seed % 3;
    p.depth = 1 + seed % 4;
    auto s = gen_random_script(p);
    auto text = print_script(s);
    REQUIRE(parse_script(text) == s);
    REQUIRE(print_script(gen_random_script(p)) == text);
  }
}

TEST_CASE("generator parameters") {
  GenParams p;
  p.seed = 5;
  p.queries = 0;
  auto s = gen_random_script(p);
  for (const auto& c : s.commands) {
    CHECK_FALSE(std::holds_alternative<QueryCmd>(c));
  }
  p.queries = 30;
  p.delete_prob = 0;
  for (const auto& c : gen_random_script(p).commands) {
    CHECK_FALSE(std::holds_alternative<DelCmd>(c));
  }
  p.delete_prob = 0.5;
  std::size_t dels = 0;
  for (const auto& c : gen_random_script(p).commands) {
    dels += std::holds_alternative<DelCmd>(c);
  }
  CHECK(dels > 0);
}

TEST_CASE("the two-equality walkthrough passes in every mode") {
  auto s = parse_script(kSwapScript);
  RunOptions opt;
  opt.modes = kAll;
  opt.check_structure = true;
  auto rep = run_script(s, opt, "walkthrough");
  CHECK(rep.ok());
  CHECK(rep.expects.size() == 6);
  CHECK(rep.divergences.empty());
  for (const auto& m : rep.modes) {
    CHECK(m.error.empty());
    REQUIRE(m.results.size() == 2);
    CHECK(m.results[1].eqs == std::vector<std::string>{"e1"});
  }
  auto csv = stats_csv({rep});
  auto shared = csv_row(csv, 3);
  REQUIRE(shared.size() == 17);
  CHECK(shared[1] == "shared");
  CHECK(shared[3] == "2");
  CHECK(std::stoi(shared[4]) >= 1);
}

TEST_CASE("csv with no reports is just the header") {
  CHECK(stats_csv({}) == std::string(kStatsHeader) + "\n");
}

TEST_CASE("a wrong expectation fails the run") {
  auto s = parse_script("sig f/2 p=2\nsig a/0 p=1\nord kbo\neq e1: f(x,y) = f(y,x)\nquery q: x:=a, y:=a\nexpect q: {e1}\n");
  RunOptions opt;
  opt.modes = kAll;
  auto rep = run_script(s, opt);
  CHECK_FALSE(rep.ok());
  CHECK(rep.divergences.empty());
}

TEST_CASE("order override") {
  auto s = parse_script(kSwapScript);
  RunOptions opt;
  opt.order_override = OrderKind::LPO;
  auto rep = run_script(s, opt);
  CHECK(rep.modes.front().order == OrderKind::LPO);
  CHECK(rep.ok());
}

TEST_CASE("queries reach every group whose variables are bound") {
  auto s = parse_script(R"(sig f/2 p=3
sig g/1 p=4
sig a/0 p=2
sig b/0 p=1
ord lpo
eq c1: f(x,y) = f(y,x)
eq c2: g(f(x,u)) = f(u,x)
eq c3: g(w) = w
query q1: x:=g(a), y:=a, u:=b
expect q1: {c1, c2}
query q2: w:=a
expect q2: {c3}
query q3: x:=a, y:=a, u:=a, w:=b
expect q3: {c2, c3}
)");
  RunOptions opt;
  opt.modes = kAll;
  auto rep = run_script(s, opt);
  for (const auto& e : rep.expects) {
    INFO(e.query, " ", to_string(e.mode));
    CHECK(e.pass);
  }
  CHECK(rep.ok());
}

TEST_CASE("first returns a prefix of all") {
  auto s = parse_script(R"(sig f/2 p=2
sig a/0 p=1
ord kbo
eq e1: f(x,y) = f(y,x)
eq e2: f(x,y) = f(y,y)
eq e3: f(x,y) = x
query q: x:=f(a,a), y:=a
)");
  for (auto mode : kAll) {
    RunOptions all, first;
    all.modes = first.modes = {mode};
    first.want = Want::First;
    auto ra = run_script(s, all).modes.front().results.front().eqs;
    auto rf = run_script(s, first).modes.front().results.front().eqs;
    CHECK(ra == std::vector<std::string>{"e1", "e2", "e3"});
    CHECK(rf == std::vector<std::string>{"e1"});
  }
}

TEST_CASE("crosscheck on a larger generated script") {
  GenParams p;
  p.seed = 42;
  p.equalities = 30;
  p.queries = 150;
  p.groups = 4;
  p.per_group = 6;
  auto s = gen_random_script(p);
  CHECK(s.commands.size() >= 180);
  RunOptions opt;
  opt.modes = kAll;
  opt.check_structure = true;
  auto rep = run_script(s, opt);
  CHECK(rep.divergences.empty());
  CHECK(rep.ok());
}

TEST_CASE("parallel batch matches the serial reference") {
  std::vector<GenParams> ps;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    GenParams p;
    p.seed = seed;
    ps.push_back(p);
  }
  auto serial = run_batch_serial(ps, false);
  auto parallel = run_batch_parallel(ps, false);
  CHECK(serial == parallel);
  for (const auto& o : serial) {
    INFO(o.seed, " ", o.message);
    CHECK(o.ok);
  }
}

TEST_CASE("crosschecked modes agree whether run on threads or not") {
  GenParams p;
  p.seed = 9;
  auto s = gen_random_script(p);
  RunOptions a, b;
  a.modes = b.modes = kAll;
  b.parallel = false;
  CHECK(run_script(s, a) == run_script(s, b));
}

TEST_CASE("benchmark families") {
  auto swap = bench_script("swap", 200, 3);
  RunOptions opt;
  opt.modes = kAll;
  auto rep = run_script(swap, opt, "swap");
  REQUIRE(rep.ok());
  const auto& off = rep.modes[0].stats;
  const auto& shared = rep.modes[2].stats;
  CHECK(off.naive_comparisons > shared.traversed[kTypeTerm]);
  CHECK(off.queries == 200);

  auto poly = bench_script("poly", 200, 3);
  auto prep = run_script(poly, opt, "poly");
  CHECK(prep.ok());
  CHECK(prep.modes[2].stats.demodulators >= 3);
  CHECK_THROWS_AS(bench_script("nope", 1), Error);
}
