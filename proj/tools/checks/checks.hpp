#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtrace/polynomial.hpp"

namespace qtrace::checks {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  bool evaluated = true;  ///< false when the check threw before producing a verdict
  double seconds = 0.0;
  double budget_seconds = 0.0;  ///< 0 means no runtime limit
  std::string summary;
  nlohmann::json detail;
};

struct Options {
  std::uint64_t seed = 20240611;
  double t = 1.0;
  double mu = 0.0;  ///< 0 uses floor(d(m+1)/m) + 1 per polynomial
  std::int64_t table_samples = 1'000'000;
  int table_replicates = 20;
  std::int64_t dual_samples = 200'000;
  int dual_replicates = 10;
  std::int64_t probe_samples = 200'000;
  int probe_replicates = 20;
};

CheckResult check_btable(const Options& o);
CheckResult check_residues(const Options& o);
CheckResult check_symbolic(const Options& o);
CheckResult check_anchors(const Options& o);
CheckResult check_vanishing(const Options& o);
CheckResult check_even_anchor(const Options& o);
CheckResult check_trace_identity(const Options& o);
CheckResult check_spectra(const Options& o);
CheckResult check_tables(const Options& o);
CheckResult check_dual_route(const Options& o);
CheckResult check_probe(const Options& o);

inline constexpr int kCheckCount = 11;

/// Runs check `id` (1-based), catching exceptions into an unevaluated result.
CheckResult run_check(int id, const Options& o);

nlohmann::json to_json(const CheckResult& r);

// ---------------------------------------------------------------------------
// Appendix tables.

struct TableEntry {
  int example;                 ///< 1, 2 or 3
  std::vector<double> params;  ///< alpha, or (alpha, beta)
  double paper;
  MultiPoly poly{1};
  int d;
};

std::vector<TableEntry> appendix_tables();

struct TableRow {
  TableEntry entry;
  double mu = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
  double cutoff_radius = 0.0;
  double ratio = 0.0;        ///< value / value of the first row of the same example
  double paper_ratio = 0.0;  ///< the same for the paper's values
};

struct TableOptions {
  std::uint64_t seed = 20240611;
  double t = 1.0;
  double mu = 0.0;
  std::int64_t samples = 1'000'000;
  int replicates = 20;
  std::vector<int> examples{1, 2, 3};
};

struct TableVerdict {
  bool positive = true;
  bool monotone = true;
  bool ratios = true;
  double worst_ratio_error = 0.0;
  std::vector<std::string> notes;
};

std::vector<TableRow> compute_tables(const TableOptions& o);
TableVerdict judge_tables(const std::vector<TableRow>& rows, double ratio_tol = 0.25);
nlohmann::json to_json(const TableRow& r);
std::string tables_csv(const std::vector<TableRow>& rows);

}  // namespace qtrace::checks
