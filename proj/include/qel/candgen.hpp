#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qel/feature_vector.hpp"
#include "qel/index.hpp"

namespace qel {

// One (anchor, entity) pair harvested from retrieved sentences.
//   anchor   normalized space-joined token key of the anchor text
//   entity   normalized title
//   support  ids of retrieved sentences annotating exactly this pair
//   w        |support|
//   sc       max retrieval score over support
struct Candidate {
  std::string anchor;
  std::string entity;
  std::vector<SentenceId> support;
  std::vector<const AnnotatedSentence*> support_sentences;
  std::uint64_t w = 0;
  double sc = 0.0;
  std::optional<FeatureVector> features;
};

struct RelatedEntity {
  std::string entity;
  std::vector<SentenceId> support;
};

struct CandidateSet {
  std::string query;
  std::vector<Candidate> candidates;
  // Every entity seen in the retrieved sentences, candidates included.
  std::vector<RelatedEntity> related;
};

// True iff the title's tokens (parenthetical disambiguator stripped) occur as
// a contiguous subsequence of the query tokens. Empty titles never match.
bool entity_in_query(const std::string& entity,
                     const std::vector<std::string>& query_tokens);

// Aggregates every annotation of every result sentence into pairs,
// sorted by (anchor, entity).
std::vector<Candidate> extract_pairs(const std::vector<ScoredSentence>& results);

// Keeps pairs whose anchor occurs contiguously in the query as candidates;
// all extracted entities land in `related` regardless.
CandidateSet partition_candidates(std::vector<Candidate> pairs,
                                  const std::string& query);

// Long-string rule: drop a candidate when a strictly longer candidate anchor
// contains its anchor and has at least its support count. Single pass over
// the input set; no cascading.
CandidateSet prune_long_string(CandidateSet cs);

// Title-match rule: among candidates sharing an anchor, drop entities absent
// from the query whose support count is strictly below some entity that is
// present in the query. Single pass.
CandidateSet prune_title_match(CandidateSet cs, const std::string& query);

// Anchor text -> known entities with their global annotation counts.
// Page titles map to their own entity with count 0 when never annotated.
struct AnchorDictionary {
  std::map<std::string, std::vector<std::pair<std::string, std::uint64_t>>> entities;
};

struct LinkStats;  // stats.hpp

AnchorDictionary build_anchor_dictionary(const LinkStats& stats,
                                         const std::vector<std::string>& titles);

// Baseline candidate generation by dictionary lookup alone: every dictionary
// anchor found in the query contributes all of its entities. No support
// sentences, so w comes from the dictionary counts and sc stays 0.
CandidateSet entity_search_candidates(const std::string& query,
                                      const AnchorDictionary& dictionary);

}  // namespace qel
