// todx: run, generate and benchmark term ordering diagram scripts.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "todx/runner.hpp"
#include "todx/script.hpp"

namespace {

using namespace todx;

std::vector<IndexMode> modes_of(const std::string& m) {
  if (m == "crosscheck") {
    return {IndexMode::Off, IndexMode::PerEquality, IndexMode::SharedByLhs};
  }
  return {*parse_index_mode(m)};
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "todx: cannot write " << path << '\n';
    return false;
  }
  return true;
}

void print_report(const RunReport& rep) {
  for (const auto& w : rep.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  for (const auto& m : rep.modes) {
    if (!m.error.empty()) {
      std::cerr << to_string(m.mode) << ": error: " << m.error << '\n';
    }
  }
  if (!rep.modes.empty()) {
    const auto& m = rep.modes.front();
    for (const auto& q : m.results) {
      std::cout << q.id << ": {";
      for (std::size_t i = 0; i < q.eqs.size(); ++i) {
        std::cout << (i ? "," : "") << q.eqs[i];
      }
      std::cout << "}\n";
    }
  }
  for (const auto& e : rep.expects) {
    if (!e.pass) {
      std::cerr << to_string(e.mode) << ": expect " << e.query << " failed\n";
    }
  }
  for (const auto& d : rep.divergences) {
    std::cerr << "divergence: " << d << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Term ordering diagrams: post-ordering retrieval for unorientable equalities"};
  app.require_subcommand(1);

  const std::vector<std::string> mode_names{"off", "on", "shared", "crosscheck"};

  auto* run = app.add_subcommand("run", "Execute a script");
  std::string file;
  std::string mode = "shared";
  std::string want = "all";
  std::string order_override;
  std::string stats_path;
  run->add_option("file", file, "Script file")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", mode, "Index mode")->check(CLI::IsMember(mode_names));
  run->add_option("--want", want, "Retrieve the first or all ordered equalities")
      ->check(CLI::IsMember({"first", "all"}));
  run->add_option("--order-override", order_override, "Replace the script's ordering")
      ->check(CLI::IsMember({"kbo", "lpo"}));
  run->add_option("--stats", stats_path, "Write counters as CSV");

  auto* gen = app.add_subcommand("gen", "Generate a random script");
  GenParams gp;
  std::string out_path;
  std::string gen_order;
  gen->add_option("--seed", gp.seed, "Random seed")->required();
  gen->add_option("--out", out_path, "Output file")->required();
  gen->add_option("--symbols", gp.symbols, "Number of symbols (<= 5)")->check(CLI::Range(2, 5));
  gen->add_option("--max-arity", gp.max_arity, "Largest arity (<= 3)")->check(CLI::Range(1, 3));
  gen->add_option("--depth", gp.depth, "Term depth (<= 4)")->check(CLI::Range(1, 4));
  gen->add_option("--vars", gp.vars, "Equality variables")->check(CLI::Range(1, 4));
  gen->add_option("--groups", gp.groups, "Distinct left-hand sides")->check(CLI::Range(1, 10));
  gen->add_option("--per-group", gp.per_group, "Equalities per left-hand side (<= 6)")->check(CLI::Range(1, 6));
  gen->add_option("--equalities", gp.equalities, "Equalities (<= 30)")->check(CLI::Range(0, 30));
  gen->add_option("--queries", gp.queries, "Queries (<= 200)")->check(CLI::Range(0, 200));
  gen->add_option("--delete-prob", gp.delete_prob, "Chance of a delete after each command")
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--order", gen_order, "Ordering, random if omitted")->check(CLI::IsMember({"kbo", "lpo"}));

  auto* bench = app.add_subcommand("bench", "Run a benchmark family");
  std::string family = "swap";
  unsigned n = 1000;
  std::uint64_t bench_seed = 1;
  std::string bench_mode = "crosscheck";
  std::string bench_stats;
  bench->add_option("--family", family, "Benchmark family")->check(CLI::IsMember({"swap", "poly"}));
  bench->add_option("--n", n, "Number of queries");
  bench->add_option("--seed", bench_seed, "Random seed");
  bench->add_option("--mode", bench_mode, "Index mode")->check(CLI::IsMember(mode_names));
  bench->add_option("--stats", bench_stats, "Write counters as CSV (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::ifstream in(file);
      std::stringstream buf;
      buf << in.rdbuf();
      Script script = parse_script(buf.str());
      RunOptions opt;
      opt.modes = modes_of(mode);
      opt.want = want == "first" ? Want::First : Want::All;
      if (!order_override.empty()) {
        opt.order_override = order_override == "kbo" ? OrderKind::KBO : OrderKind::LPO;
      }
      auto rep = run_script(script, opt, file);
      print_report(rep);
      if (!stats_path.empty() && !write_file(stats_path, stats_csv({rep}))) {
        return 1;
      }
      return rep.ok() ? 0 : 1;
    }
    if (*gen) {
      if (!gen_order.empty()) {
        gp.order = gen_order == "kbo" ? OrderKind::KBO : OrderKind::LPO;
      }
      return write_file(out_path, print_script(gen_random_script(gp))) ? 0 : 1;
    }
    if (*bench) {
      Script script = bench_script(family, n, bench_seed);
      RunOptions opt;
      opt.modes = modes_of(bench_mode);
      auto rep = run_script(script, opt, family + "-n" + std::to_string(n));
      for (const auto& d : rep.divergences) {
        std::cerr << "divergence: " << d << '\n';
      }
      for (const auto& m : rep.modes) {
        if (!m.error.empty()) {
          std::cerr << to_string(m.mode) << ": error: " << m.error << '\n';
        }
      }
      auto csv = stats_csv({rep});
      if (bench_stats.empty()) {
        std::cout << csv;
      } else if (!write_file(bench_stats, csv)) {
        return 1;
      }
      return rep.ok() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "todx: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
