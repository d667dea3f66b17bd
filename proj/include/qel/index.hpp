#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qel/corpus.hpp"

namespace qel {

using SentenceId = std::uint32_t;

struct Posting {
  SentenceId sentence_id;
  std::uint32_t tf;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct ScoredSentence {
  SentenceId sentence_id;
  double score;  // always > 0; zero-score documents are never returned
  const AnnotatedSentence* sentence;
};

// Immutable inverted index over the sentences of a corpus that carry at
// least one annotation. Searching scores with the classic vector-space
// tf-idf:
//
//   score(q, d) = coord(q, d) * sum_t sqrt(tf(t, d)) * idf(t)^2 / sqrt(|d|)
//   idf(t)      = 1 + ln(doc_count / (df(t) + 1))
//   coord(q, d) = |matching distinct query terms| / |distinct query terms|
//
// Per-document accumulation runs over distinct query terms in lexicographic
// order, so scores are bit-reproducible.
class Index {
 public:
  static Index build(const Corpus& corpus);

  std::size_t doc_count() const { return store_.size(); }
  const AnnotatedSentence& sentence(SentenceId id) const;
  const std::map<std::string, std::vector<Posting>>& postings() const {
    return postings_;
  }
  const std::vector<std::uint32_t>& doc_lengths() const { return doc_lengths_; }

  // Score of one document for the given query terms (deduplicated
  // internally). Throws std::out_of_range for an unknown sentence id.
  double score_document(const std::vector<std::string>& query_terms,
                        SentenceId sentence_id) const;

  // Top-k sentences by score, ties broken by ascending sentence id. An empty
  // query (after normalization) yields an empty result.
  std::vector<ScoredSentence> search(std::string_view query, std::size_t k) const;

  // Used by the artifact container reader; enforces the index invariants.
  static Index from_parts(std::map<std::string, std::vector<Posting>> postings,
                          std::vector<AnnotatedSentence> store);

 private:
  std::map<std::string, std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_lengths_;  // token count per sentence id
  std::vector<AnnotatedSentence> store_;    // sentence id = position
};

}  // namespace qel
