#pragma once

#include <set>
#include <string>
#include <vector>

#include "qel/ranker.hpp"

namespace qel {

struct GoldQuery {
  std::string query;
  std::set<std::string> gold;
};

struct QueryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::vector<QueryMetrics> per_query;
  double average_precision = 0.0;
  double average_recall = 0.0;
  double average_f1 = 0.0;
};

// Set precision/recall with the conventions: empty hypothesis scores
// precision 1, empty gold scores recall 1, and F1 is 0 when both P and R are.
QueryMetrics query_f1(const std::set<std::string>& gold,
                      const std::set<std::string>& hypothesis);

// Arithmetic means over aligned queries; errors on length mismatch or an
// empty dataset.
EvalReport average_f1(const std::vector<GoldQuery>& dataset,
                      const std::vector<Interpretation>& outputs);

// TSV of `query \t e1;e2;...` lines, one per query; the second column may be
// empty. Blank lines and lines starting with `#` are skipped, so annotation
// files produced with --explain read back cleanly.
std::vector<GoldQuery> load_dataset(const std::string& path);

// Per-query TSV rows followed by the three averages.
std::string format_report(const EvalReport& report);

}  // namespace qel
