#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qel/candgen.hpp"
#include "qel/corpus.hpp"
#include "qel/feature_vector.hpp"
#include "qel/stats.hpp"

namespace qel {

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<double>> vectors;
};

// Text format: `<vocab_size> <dimension>` header line, then one
// `word v1 v2 ... vd` per line. A duplicate word overwrites the earlier
// entry and appends a note to `warnings` when given.
EmbeddingTable load_embeddings(const std::string& path,
                               std::vector<std::string>* warnings = nullptr);

// Arithmetic mean of the vectors of in-vocabulary tokens; zero vector when
// none are known.
std::vector<double> sentence_embedding(const EmbeddingTable& table,
                                       const std::vector<std::string>& tokens);

// Cosine similarity; 0 whenever either vector has zero norm.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

// Mean over context tokens of the fraction of support sentences containing
// the token. Empty context or empty support gives 0.
double context_match_score(const std::vector<std::string>& context_tokens,
                           const std::vector<const AnnotatedSentence*>& support);

// Per-entity corpus lookups used by the description and page-overlap features.
//   first_sentence  lead sentence of the entity's own page
//   disamb_desc     first disambiguation-page sentence annotating the entity
//   entity_pages    titles of pages where the entity is annotated, plus its own
struct EntityResources {
  std::map<std::string, std::string> first_sentence;
  std::map<std::string, std::string> disamb_desc;
  std::map<std::string, std::vector<std::string>> entity_pages;
};

EntityResources build_entity_resources(const Corpus& corpus);

FeatureVector extract_features(const Candidate& cand, const CandidateSet& cs,
                               const std::string& query, const LinkStats& stats,
                               const EntityResources& res,
                               const EmbeddingTable& emb);

}  // namespace qel
