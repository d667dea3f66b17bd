#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qel/candgen.hpp"
#include "qel/eval.hpp"
#include "qel/features.hpp"
#include "qel/index.hpp"
#include "qel/ranker.hpp"
#include "qel/stats.hpp"

namespace qel {

// Bad settings (unknown key, K < 1, non-finite threshold, ...) — a usage
// error, as opposed to malformed data files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  std::string corpus_path;
  std::string index_path;
  std::string stats_path;  // prefix: writes <prefix>.anchors and <prefix>.pairs
  std::string embeddings_path;
  std::string model_path;
  std::uint64_t k = 700;
  double threshold = 0.56;
  double c = 1.0;
  double eps = 0.1;
  std::size_t workers = 1;
};

// Flat `key=value` lines over `base`; blank lines and `#` comments are
// skipped; an unknown key is a ConfigError.
PipelineConfig load_config_file(const std::string& path,
                                const PipelineConfig& base);
void validate_config(const PipelineConfig& config);

struct Artifacts {
  Index index;
  LinkStats stats;
  EntityResources resources;
};

Artifacts build_artifacts(const PipelineConfig& config);

// The index file carries the entity resources alongside the index sections
// so `link` needs no corpus access; stats live next to it as two TSVs.
void save_index_container(const Index& index, const EntityResources& resources,
                          const std::string& path);
std::pair<Index, EntityResources> load_index_container(const std::string& path);

void save_artifacts(const Artifacts& artifacts, const PipelineConfig& config);
Artifacts load_artifacts(const PipelineConfig& config);

// search -> pair extraction -> partition -> long-string prune -> title prune
CandidateSet generate_candidates(const Index& index, const std::string& query,
                                 std::uint64_t k);

void featurize(CandidateSet& cs, const LinkStats& stats,
               const EntityResources& resources, const EmbeddingTable& emb);

struct LinkResult {
  CandidateSet candidates;      // featurized
  std::vector<double> scores;   // aligned with candidates
  Interpretation selected;
};

LinkResult link_query(const Artifacts& artifacts, const EmbeddingTable& emb,
                      const RegressionModel& model, const std::string& query,
                      std::uint64_t k);

// Candidate examples for every dataset query, labeled against its gold set,
// pooled in dataset order regardless of worker count.
std::vector<TrainingExample> collect_examples(const Artifacts& artifacts,
                                              const EmbeddingTable& emb,
                                              const std::vector<GoldQuery>& dataset,
                                              std::uint64_t k,
                                              std::size_t workers);

struct TuneCell {
  std::uint64_t k = 0;
  double threshold = 0.0;
  double f1 = 0.0;
};

struct TuneResult {
  TuneCell best;
  std::vector<TuneCell> grid;  // ascending k, then ascending threshold
};

// Exhaustive grid evaluation; ties prefer smaller k, then smaller threshold.
TuneResult tune_grid(const Artifacts& artifacts, const EmbeddingTable& emb,
                     const RegressionModel& model,
                     const std::vector<GoldQuery>& dev,
                     std::vector<std::uint64_t> k_grid,
                     std::vector<double> threshold_grid, std::size_t workers);

// One query per line; lines with tabs keep only the first field, so gold
// dataset files double as query files. `#` lines and blanks are skipped.
std::vector<std::string> load_queries(const std::string& path);

}  // namespace qel
