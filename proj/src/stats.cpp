#include "qel/stats.hpp"

#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "qel/tokenizer.hpp"
#include "util.hpp"

namespace qel {

double LinkStats::lp(std::string_view anchor_key) const {
  auto f = freq.find(std::string(anchor_key));
  if (f == freq.end() || f->second == 0) return 0.0;
  auto l = link.find(std::string(anchor_key));
  if (l == link.end()) return 0.0;
  return static_cast<double>(l->second) / static_cast<double>(f->second);
}

double LinkStats::prior(std::string_view anchor_key, std::string_view entity) const {
  auto l = link.find(std::string(anchor_key));
  if (l == link.end() || l->second == 0) return 0.0;
  auto p = pair_freq.find({std::string(anchor_key), std::string(entity)});
  if (p == pair_freq.end()) return 0.0;
  return static_cast<double>(p->second) / static_cast<double>(l->second);
}

namespace {

struct AnchorPattern {
  std::vector<std::string> tokens;
  std::string key;
};

// Counts non-overlapping occurrences of every pattern in one token sequence.
// Each pattern is scanned independently, greedily left to right, so an
// occurrence only blocks later overlapping occurrences of the same pattern.
void count_occurrences(const std::vector<std::string>& tokens,
                       const std::vector<AnchorPattern>& patterns,
                       const std::map<std::string, std::vector<std::size_t>>& by_first,
                       std::uint32_t generation,
                       std::vector<std::uint32_t>& stamp,
                       std::vector<std::size_t>& next_allowed,
                       std::map<std::size_t, std::uint64_t>& counts) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto bucket = by_first.find(tokens[i]);
    if (bucket == by_first.end()) continue;
    for (std::size_t pi : bucket->second) {
      const auto& pat = patterns[pi].tokens;
      if (stamp[pi] == generation && i < next_allowed[pi]) continue;
      if (pat.size() > tokens.size() - i) continue;
      bool match = true;
      for (std::size_t j = 1; j < pat.size(); ++j) {
        if (tokens[i + j] != pat[j]) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      ++counts[pi];
      stamp[pi] = generation;
      next_allowed[pi] = i + pat.size();
    }
  }
}

}  // namespace

LinkStats compute_link_stats(const Corpus& corpus, std::size_t workers) {
  LinkStats stats;

  // Pass 1: annotation counts.
  for (const auto& page : corpus.pages) {
    for (const auto& sent : page.sentences) {
      for (const auto& ann : sent.annotations) {
        std::vector<std::string> toks = normalized_tokens(ann.anchor_text);
        if (toks.empty()) continue;
        std::string key = join_tokens(toks);
        ++stats.link[key];
        ++stats.pair_freq[{key, normalize_title(ann.entity)}];
      }
    }
  }

  // Pass 2: text occurrence counts for every anchor seen in pass 1.
  std::vector<AnchorPattern> patterns;
  patterns.reserve(stats.link.size());
  std::map<std::string, std::vector<std::size_t>> by_first;
  for (const auto& [key, n] : stats.link) {
    (void)n;
    AnchorPattern pat;
    pat.tokens = split_key(key);
    pat.key = key;
    by_first[pat.tokens.front()].push_back(patterns.size());
    patterns.push_back(std::move(pat));
  }

  std::vector<std::map<std::size_t, std::uint64_t>> per_page(corpus.pages.size());
  detail::parallel_for(corpus.pages.size(), workers, [&](std::size_t pi) {
    thread_local std::vector<std::uint32_t> stamp;
    thread_local std::vector<std::size_t> next_allowed;
    thread_local std::uint32_t generation = 0;
    if (stamp.size() != patterns.size()) {
      stamp.assign(patterns.size(), 0);
      next_allowed.assign(patterns.size(), 0);
      generation = 0;
    }
    auto& counts = per_page[pi];
    for (const auto& sent : corpus.pages[pi].sentences) {
      ++generation;
      count_occurrences(sent.norm_tokens(), patterns, by_first, generation,
                        stamp, next_allowed, counts);
    }
  });

  for (const auto& counts : per_page)
    for (const auto& [pi, n] : counts) stats.freq[patterns[pi].key] += n;

  return stats;
}

void save_link_stats(const LinkStats& stats, const std::string& prefix) {
  {
    std::ofstream out(prefix + ".anchors", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + prefix + ".anchors");
    for (const auto& [key, f] : stats.freq) {
      std::uint64_t l = 0;
      auto it = stats.link.find(key);
      if (it != stats.link.end()) l = it->second;
      out << key << '\t' << f << '\t' << l << '\n';
    }
  }
  {
    std::ofstream out(prefix + ".pairs", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + prefix + ".pairs");
    for (const auto& [key, n] : stats.pair_freq)
      out << key.first << '\t' << key.second << '\t' << n << '\n';
  }
}

LinkStats load_link_stats(const std::string& prefix) {
  LinkStats stats;
  {
    std::string path = prefix + ".anchors";
    std::vector<std::string> lines = detail::split_lines(detail::read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      std::vector<std::string> fields = detail::split_fields(lines[i], '\t');
      if (fields.size() != 3)
        throw ParseError(path + ": expected 3 tab-separated fields", 0,
                         static_cast<long>(i + 1));
      stats.freq[fields[0]] = detail::parse_u64(fields[1]);
      std::uint64_t l = detail::parse_u64(fields[2]);
      if (l != 0) stats.link[fields[0]] = l;
    }
  }
  {
    std::string path = prefix + ".pairs";
    std::vector<std::string> lines = detail::split_lines(detail::read_file(path));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      std::vector<std::string> fields = detail::split_fields(lines[i], '\t');
      if (fields.size() != 3)
        throw ParseError(path + ": expected 3 tab-separated fields", 0,
                         static_cast<long>(i + 1));
      stats.pair_freq[{fields[0], fields[1]}] = detail::parse_u64(fields[2]);
    }
  }
  return stats;
}

}  // namespace qel
