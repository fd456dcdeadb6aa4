#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "todx/index.hpp"
#include "todx/script.hpp"

namespace todx {

struct QueryResult {
  std::string id;
  std::vector<std::string> eqs;
  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

struct ModeReport {
  IndexMode mode = IndexMode::Off;
  OrderKind order = OrderKind::KBO;
  std::vector<QueryResult> results;
  Stats stats;
  // empty unless a TOD check failed or an error was raised
  std::string error;
  friend bool operator==(const ModeReport&, const ModeReport&) = default;
};

struct ExpectResult {
  std::string query;
  IndexMode mode = IndexMode::Off;
  std::vector<std::string> expected;
  std::vector<std::string> actual;
  bool pass = false;
  friend bool operator==(const ExpectResult&, const ExpectResult&) = default;
};

struct RunReport {
  std::string name;
  std::vector<ModeReport> modes;
  std::vector<ExpectResult> expects;
  std::vector<std::string> divergences;
  std::vector<std::string> warnings;

  bool ok() const;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

struct RunOptions {
  /// Modes to run; more than one means crosscheck.
  std::vector<IndexMode> modes{IndexMode::SharedByLhs};
  Want want = Want::All;
  std::optional<OrderKind> order_override;
  /// Check TOD invariants (including visited-path stability) after every
  /// command. Slow; meant for fuzzing.
  bool check_structure = false;
  /// Run the modes of a crosscheck on separate threads.
  bool parallel = true;
};

/// Executes a script against one fresh index in the given mode.
ModeReport run_mode(const Script& script, IndexMode mode, const RunOptions& opt);

/// Runs every requested mode, evaluates expect lines per mode and compares
/// result sets across modes.
RunReport run_script(const Script& script, const RunOptions& opt, std::string name = "script");

inline constexpr const char* kStatsHeader =
    "script,mode,order,queries,answers,demodulators,tods,created_term,created_success,created_pos,"
    "processed_term,processed_success,processed_pos,traversed_term,traversed_success,traversed_pos,"
    "naive_comparisons";

/// Header plus one row per (report, mode).
std::string stats_csv(const std::vector<RunReport>& reports);

/// One seeded random scenario checked across all modes and against the
/// instantiate-and-compare oracle.
struct ScenarioOutcome {
  std::uint64_t seed = 0;
  OrderKind order = OrderKind::KBO;
  bool ok = true;
  std::string message;
  std::uint64_t queries = 0;
  friend bool operator==(const ScenarioOutcome&, const ScenarioOutcome&) = default;
};

ScenarioOutcome run_scenario(const GenParams& params, bool check_structure);

/// Runs many scenarios. The serial version is the reference for the
/// OpenMP one; both return outcomes in seed order.
std::vector<ScenarioOutcome> run_batch_serial(const std::vector<GenParams>& params, bool check_structure);
std::vector<ScenarioOutcome> run_batch_parallel(const std::vector<GenParams>& params, bool check_structure);

/// Benchmark families.
///   swap: {f(x,y) = f(y,x), f(x,y) = f(x,x)} queried with n random ground
///         substitutions;
///   poly: random unorientable KBO equalities with weight differences.
Script bench_script(const std::string& family, unsigned n, std::uint64_t seed = 1);

}  // namespace todx
