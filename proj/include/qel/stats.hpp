#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "qel/corpus.hpp"

namespace qel {

// Corpus-wide anchor statistics. Anchors are keyed by their normalized,
// space-joined token sequence; entities by their normalized title.
//
//   freq(a)      occurrences of a's token sequence anywhere in the corpus,
//                counted greedily left to right without overlap
//   link(a)      occurrences of a as an annotation
//   pair(a, e)   annotations of a pointing at entity e
struct LinkStats {
  std::map<std::string, std::uint64_t> freq;
  std::map<std::string, std::uint64_t> link;
  std::map<std::pair<std::string, std::string>, std::uint64_t> pair_freq;

  // link(a) / freq(a); zero for unknown text.
  double lp(std::string_view anchor_key) const;
  // pair(a, e) / link(a); zero when a was never an anchor.
  double prior(std::string_view anchor_key, std::string_view entity) const;
};

LinkStats compute_link_stats(const Corpus& corpus, std::size_t workers = 1);

// Two TSV files: `<prefix>.anchors` holds `a \t freq \t link`,
// `<prefix>.pairs` holds `a \t e \t pair_freq`, both sorted.
void save_link_stats(const LinkStats& stats, const std::string& prefix);
LinkStats load_link_stats(const std::string& prefix);

}  // namespace qel
