#include "qel/candgen.hpp"

#include <algorithm>
#include <utility>

#include "qel/stats.hpp"
#include "qel/tokenizer.hpp"

namespace qel {

bool entity_in_query(const std::string& entity,
                     const std::vector<std::string>& query_tokens) {
  std::vector<std::string> title_toks =
      normalized_tokens(strip_parenthetical(normalize_title(entity)));
  return contains_subsequence(query_tokens, title_toks);
}

std::vector<Candidate> extract_pairs(const std::vector<ScoredSentence>& results) {
  struct Agg {
    std::map<SentenceId, const AnnotatedSentence*> support;
    double sc = 0.0;
  };
  std::map<std::pair<std::string, std::string>, Agg> agg;
  for (const auto& res : results) {
    for (const auto& ann : res.sentence->annotations) {
      std::string key = join_tokens(normalized_tokens(ann.anchor_text));
      auto& a = agg[{key, normalize_title(ann.entity)}];
      a.support.emplace(res.sentence_id, res.sentence);
      a.sc = std::max(a.sc, res.score);
    }
  }
  std::vector<Candidate> pairs;
  pairs.reserve(agg.size());
  for (auto& [key, a] : agg) {
    Candidate c;
    c.anchor = key.first;
    c.entity = key.second;
    c.w = a.support.size();
    c.sc = a.sc;
    for (const auto& [id, sent] : a.support) {
      c.support.push_back(id);
      c.support_sentences.push_back(sent);
    }
    pairs.push_back(std::move(c));
  }
  return pairs;
}

CandidateSet partition_candidates(std::vector<Candidate> pairs,
                                  const std::string& query) {
  CandidateSet cs;
  cs.query = query;
  std::vector<std::string> query_toks = normalized_tokens(query);

  std::map<std::string, std::vector<SentenceId>> related;
  for (auto& pair : pairs) {
    auto& ids = related[pair.entity];
    ids.insert(ids.end(), pair.support.begin(), pair.support.end());
    if (contains_subsequence(query_toks, split_key(pair.anchor)))
      cs.candidates.push_back(std::move(pair));
  }
  for (auto& [entity, ids] : related) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    cs.related.push_back({entity, std::move(ids)});
  }
  return cs;
}

CandidateSet prune_long_string(CandidateSet cs) {
  const std::vector<Candidate>& in = cs.candidates;
  std::vector<std::vector<std::string>> toks(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) toks[i] = split_key(in[i].anchor);

  // Decide every drop before moving survivors out; moving as we scan would
  // hollow out anchors that later iterations still compare against.
  std::vector<bool> drop(in.size(), false);
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t j = 0; j < in.size() && !drop[i]; ++j) {
      if (in[j].anchor == in[i].anchor) continue;
      if (!contains_subsequence(toks[j], toks[i])) continue;
      if (in[i].w <= in[j].w) drop[i] = true;
    }

  std::vector<Candidate> kept;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(cs.candidates[i]));
  cs.candidates = std::move(kept);
  return cs;
}

CandidateSet prune_title_match(CandidateSet cs, const std::string& query) {
  std::vector<std::string> query_toks = normalized_tokens(query);
  const std::vector<Candidate>& in = cs.candidates;

  std::vector<bool> in_query(in.size());
  std::map<std::string, std::uint64_t> best_matching;  // anchor -> max w
  for (std::size_t i = 0; i < in.size(); ++i) {
    in_query[i] = entity_in_query(in[i].entity, query_toks);
    if (in_query[i]) {
      auto [it, fresh] = best_matching.try_emplace(in[i].anchor, in[i].w);
      if (!fresh) it->second = std::max(it->second, in[i].w);
    }
  }

  std::vector<Candidate> kept;
  for (std::size_t i = 0; i < in.size(); ++i) {
    bool drop = false;
    if (!in_query[i]) {
      auto it = best_matching.find(in[i].anchor);
      if (it != best_matching.end() && in[i].w < it->second) drop = true;
    }
    if (!drop) kept.push_back(std::move(cs.candidates[i]));
  }
  cs.candidates = std::move(kept);
  return cs;
}

AnchorDictionary build_anchor_dictionary(const LinkStats& stats,
                                         const std::vector<std::string>& titles) {
  std::map<std::string, std::map<std::string, std::uint64_t>> table;
  for (const auto& [key, n] : stats.pair_freq) table[key.first][key.second] = n;
  for (const auto& title : titles) {
    std::string entity = normalize_title(title);
    std::string key = join_tokens(normalized_tokens(entity));
    if (key.empty()) continue;
    table[key].try_emplace(entity, 0);
  }
  AnchorDictionary dict;
  for (auto& [anchor, ents] : table) {
    auto& out = dict.entities[anchor];
    out.assign(ents.begin(), ents.end());
  }
  return dict;
}

CandidateSet entity_search_candidates(const std::string& query,
                                      const AnchorDictionary& dictionary) {
  CandidateSet cs;
  cs.query = query;
  std::vector<std::string> query_toks = normalized_tokens(query);
  for (const auto& [anchor, ents] : dictionary.entities) {
    if (!contains_subsequence(query_toks, split_key(anchor))) continue;
    for (const auto& [entity, n] : ents) {
      Candidate c;
      c.anchor = anchor;
      c.entity = entity;
      c.w = n;
      cs.candidates.push_back(std::move(c));
    }
  }
  return cs;
}

}  // namespace qel
