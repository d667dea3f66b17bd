#include "qel/index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qel {

Index Index::build(const Corpus& corpus) {
  Index index;
  for (const auto& page : corpus.pages) {
    for (const auto& s : page.sentences) {
      if (s.annotations.empty()) continue;  // only annotated sentences
      index.store_.push_back(s);
    }
  }
  index.doc_lengths_.reserve(index.store_.size());
  for (SentenceId id = 0; id < index.store_.size(); ++id) {
    const AnnotatedSentence& s = index.store_[id];
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(s.tokens.size()));
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : s.tokens) ++tf[t.norm];
    for (const auto& [term, count] : tf)
      index.postings_[term].push_back(Posting{id, count});
  }
  return index;
}

Index Index::from_parts(std::map<std::string, std::vector<Posting>> postings,
                        std::vector<AnnotatedSentence> store) {
  Index index;
  index.store_ = std::move(store);
  index.postings_ = std::move(postings);
  for (const auto& [term, plist] : index.postings_) {
    SentenceId prev = 0;
    bool first = true;
    for (const Posting& p : plist) {
      if (p.sentence_id >= index.store_.size())
        throw std::runtime_error("posting refers to unknown sentence id");
      if (!first && p.sentence_id <= prev)
        throw std::runtime_error("posting list not strictly ascending: " + term);
      prev = p.sentence_id;
      first = false;
    }
  }
  index.doc_lengths_.reserve(index.store_.size());
  for (const auto& s : index.store_)
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(s.tokens.size()));
  return index;
}

const AnnotatedSentence& Index::sentence(SentenceId id) const {
  if (id >= store_.size()) throw std::out_of_range("unknown sentence id");
  return store_[id];
}

namespace {

std::vector<std::string> distinct_sorted(std::vector<std::string> terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  return terms;
}

std::uint32_t tf_in(const std::vector<Posting>& plist, SentenceId id) {
  auto it = std::lower_bound(plist.begin(), plist.end(), id,
                             [](const Posting& p, SentenceId v) {
                               return p.sentence_id < v;
                             });
  if (it == plist.end() || it->sentence_id != id) return 0;
  return it->tf;
}

}  // namespace

double Index::score_document(const std::vector<std::string>& query_terms,
                             SentenceId sentence_id) const {
  if (sentence_id >= store_.size())
    throw std::out_of_range("unknown sentence id");
  const std::vector<std::string> terms = distinct_sorted(query_terms);
  if (terms.empty()) return 0.0;

  double sum = 0.0;
  std::size_t matched = 0;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    std::uint32_t tf = tf_in(it->second, sentence_id);
    if (tf == 0) continue;
    double idf = 1.0 + std::log(static_cast<double>(doc_count()) /
                                static_cast<double>(it->second.size() + 1));
    sum += std::sqrt(static_cast<double>(tf)) * idf * idf;
    ++matched;
  }
  if (matched == 0) return 0.0;
  double coord =
      static_cast<double>(matched) / static_cast<double>(terms.size());
  return sum * coord /
         std::sqrt(static_cast<double>(doc_lengths_[sentence_id]));
}

std::vector<ScoredSentence> Index::search(std::string_view query,
                                          std::size_t k) const {
  const std::vector<std::string> terms =
      distinct_sorted(normalized_tokens(query));
  if (terms.empty() || k == 0) return {};

  std::vector<SentenceId> cands;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    for (const Posting& p : it->second) cands.push_back(p.sentence_id);
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  std::vector<ScoredSentence> scored;
  scored.reserve(cands.size());
  for (SentenceId id : cands)
    scored.push_back(ScoredSentence{id, score_document(terms, id), &store_[id]});

  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredSentence& a, const ScoredSentence& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.sentence_id < b.sentence_id;
                   });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

}  // namespace qel
