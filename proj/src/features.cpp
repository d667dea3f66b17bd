#include "qel/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "qel/tokenizer.hpp"
#include "util.hpp"

namespace qel {

EmbeddingTable load_embeddings(const std::string& path,
                               std::vector<std::string>* warnings) {
  std::vector<std::string> lines = detail::split_lines(detail::read_file(path));

  auto pieces = [](const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
      if (line[i] == ' ') {
        ++i;
        continue;
      }
      std::size_t j = line.find(' ', i);
      if (j == std::string::npos) j = line.size();
      out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  };

  if (lines.empty() || pieces(lines[0]).size() != 2)
    throw ParseError(path + ": missing `<vocab_size> <dimension>` header", 0, 1);
  std::vector<std::string> header = pieces(lines[0]);

  EmbeddingTable table;
  std::uint64_t declared = 0;
  try {
    declared = detail::parse_u64(header[0]);
    table.dimension = detail::parse_u64(header[1]);
  } catch (const std::exception&) {
    throw ParseError(path + ": malformed header counts", 0, 1);
  }
  if (table.dimension == 0)
    throw ParseError(path + ": dimension must be positive", 0, 1);

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> fields = pieces(lines[i]);
    if (fields.size() != table.dimension + 1)
      throw ParseError(path + ": expected word plus " +
                           std::to_string(table.dimension) + " values",
                       0, static_cast<long>(i + 1));
    std::vector<double> vec(table.dimension);
    for (std::size_t d = 0; d < table.dimension; ++d) {
      try {
        vec[d] = detail::parse_double(fields[d + 1]);
      } catch (const std::exception&) {
        throw ParseError(path + ": bad number `" + fields[d + 1] + "`", 0,
                         static_cast<long>(i + 1));
      }
    }
    auto [it, fresh] = table.vectors.insert_or_assign(fields[0], std::move(vec));
    (void)it;
    if (!fresh && warnings)
      warnings->push_back(path + ":" + std::to_string(i + 1) +
                          ": duplicate word `" + fields[0] + "`, keeping last");
  }
  if (warnings && declared != table.vectors.size())
    warnings->push_back(path + ": header declares " + std::to_string(declared) +
                        " words, file has " +
                        std::to_string(table.vectors.size()));
  return table;
}

std::vector<double> sentence_embedding(const EmbeddingTable& table,
                                       const std::vector<std::string>& tokens) {
  std::vector<double> sum(table.dimension, 0.0);
  std::size_t known = 0;
  for (const auto& tok : tokens) {
    auto it = table.vectors.find(tok);
    if (it == table.vectors.end()) continue;
    ++known;
    for (std::size_t d = 0; d < table.dimension; ++d) sum[d] += it->second[d];
  }
  if (known == 0) return sum;
  for (double& v : sum) v /= static_cast<double>(known);
  return sum;
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size() || u.empty()) return 0.0;
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

double context_match_score(const std::vector<std::string>& context_tokens,
                           const std::vector<const AnnotatedSentence*>& support) {
  if (context_tokens.empty() || support.empty()) return 0.0;
  std::vector<std::set<std::string>> sets;
  sets.reserve(support.size());
  for (const auto* sent : support) {
    const auto& toks = sent->norm_tokens();
    sets.emplace_back(toks.begin(), toks.end());
  }
  double sum = 0.0;
  for (const auto& tok : context_tokens) {
    std::size_t hits = 0;
    for (const auto& s : sets)
      if (s.count(tok)) ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(support.size());
  }
  return sum / static_cast<double>(context_tokens.size());
}

EntityResources build_entity_resources(const Corpus& corpus) {
  EntityResources res;
  std::map<std::string, std::set<std::string>> pages;
  for (const auto& page : corpus.pages) {
    pages[page.title].insert(page.title);

    const AnnotatedSentence* lead = nullptr;
    for (const auto& sent : page.sentences) {
      if (sent.kind == SentenceKind::kRegular) {
        lead = &sent;
        break;
      }
    }
    if (!lead) lead = &page.sentences.front();
    res.first_sentence.emplace(page.title, lead->text);

    for (const auto& sent : page.sentences) {
      for (const auto& ann : sent.annotations) {
        std::string entity = normalize_title(ann.entity);
        pages[entity].insert(page.title);
        if (sent.kind == SentenceKind::kDisambiguation)
          res.disamb_desc.try_emplace(entity, sent.text);
      }
    }
  }
  for (auto& [entity, titles] : pages)
    res.entity_pages[entity].assign(titles.begin(), titles.end());
  return res;
}

namespace {

// Query tokens left over after removing the anchor's occurrences, scanned
// greedily left to right, then deduplicated.
std::vector<std::string> context_of(const std::vector<std::string>& query_toks,
                                    const std::vector<std::string>& anchor_toks) {
  std::vector<std::string> context;
  std::size_t i = 0;
  while (i < query_toks.size()) {
    bool match = !anchor_toks.empty() &&
                 anchor_toks.size() <= query_toks.size() - i &&
                 std::equal(anchor_toks.begin(), anchor_toks.end(),
                            query_toks.begin() + static_cast<long>(i));
    if (match) {
      i += anchor_toks.size();
      continue;
    }
    if (std::find(context.begin(), context.end(), query_toks[i]) ==
        context.end())
      context.push_back(query_toks[i]);
    ++i;
  }
  return context;
}

double token_overlap(const std::vector<std::string>& context,
                     const std::vector<std::string>& sentence_toks) {
  if (context.empty()) return 0.0;
  std::set<std::string> have(sentence_toks.begin(), sentence_toks.end());
  std::size_t hits = 0;
  for (const auto& tok : context)
    if (have.count(tok)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(context.size());
}

bool share_page(const EntityResources& res, const std::string& a,
                const std::string& b) {
  auto ia = res.entity_pages.find(a);
  auto ib = res.entity_pages.find(b);
  if (ia == res.entity_pages.end() || ib == res.entity_pages.end()) return false;
  const auto& va = ia->second;
  const auto& vb = ib->second;
  std::size_t i = 0, j = 0;
  while (i < va.size() && j < vb.size()) {
    int c = va[i].compare(vb[j]);
    if (c == 0) return true;
    if (c < 0)
      ++i;
    else
      ++j;
  }
  return false;
}

}  // namespace

FeatureVector extract_features(const Candidate& cand, const CandidateSet& cs,
                               const std::string& query, const LinkStats& stats,
                               const EntityResources& res,
                               const EmbeddingTable& emb) {
  if (cand.support_sentences.empty())
    throw std::invalid_argument("candidate `" + cand.anchor + "` -> `" +
                                cand.entity + "` has no support sentences");

  FeatureVector f{};
  std::vector<std::string> query_toks = normalized_tokens(query);
  std::string title = normalize_title(cand.entity);

  f[0] = entity_in_query(cand.entity, query_toks) ? 1.0 : 0.0;
  f[1] = title.find('(') != std::string::npos ||
                 title.find(')') != std::string::npos
             ? 1.0
             : 0.0;
  f[2] = title.find(',') != std::string::npos ? 1.0 : 0.0;
  f[3] = static_cast<double>(std::max<std::size_t>(
      1, normalized_tokens(title).size()));
  f[4] = static_cast<double>(cand.w);
  f[5] = cand.sc;
  f[6] = stats.lp(cand.anchor);
  f[7] = stats.prior(cand.anchor, cand.entity);

  std::vector<std::string> context = context_of(query_toks, split_key(cand.anchor));
  f[8] = context_match_score(context, cand.support_sentences);

  auto fs = res.first_sentence.find(cand.entity);
  auto dd = res.disamb_desc.find(cand.entity);
  f[9] = fs == res.first_sentence.end()
             ? 0.0
             : token_overlap(context, normalized_tokens(fs->second));
  f[10] = dd == res.disamb_desc.end()
              ? 0.0
              : token_overlap(context, normalized_tokens(dd->second));

  std::vector<double> query_emb = sentence_embedding(emb, query_toks);
  double best = 0.0;
  bool first = true;
  for (const auto* sent : cand.support_sentences) {
    double c = cosine(query_emb, sentence_embedding(emb, sent->norm_tokens()));
    if (first || c > best) best = c;
    first = false;
  }
  f[11] = best;
  f[12] = fs == res.first_sentence.end()
              ? 0.0
              : cosine(query_emb,
                       sentence_embedding(emb, normalized_tokens(fs->second)));
  f[13] = dd == res.disamb_desc.end()
              ? 0.0
              : cosine(query_emb,
                       sentence_embedding(emb, normalized_tokens(dd->second)));

  // Entities annotated anywhere in this candidate's support sentences.
  std::set<std::string> in_support;
  for (const auto* sent : cand.support_sentences)
    for (const auto& ann : sent->annotations)
      in_support.insert(normalize_title(ann.entity));

  std::set<std::string> candidate_entities;
  for (const auto& other : cs.candidates) candidate_entities.insert(other.entity);

  double cd_sc = 0.0, cd_sp = 0.0, re_sc = 0.0, re_sp = 0.0;
  for (const auto& entity : candidate_entities) {
    if (entity == cand.entity) continue;
    if (in_support.count(entity)) cd_sc += 1.0;
    if (share_page(res, entity, cand.entity)) cd_sp += 1.0;
  }
  for (const auto& rel : cs.related) {
    if (rel.entity == cand.entity || candidate_entities.count(rel.entity))
      continue;
    if (in_support.count(rel.entity)) re_sc += 1.0;
    if (share_page(res, rel.entity, cand.entity)) re_sp += 1.0;
  }
  f[14] = cd_sc;
  f[15] = cd_sp;
  f[16] = re_sc;
  f[17] = re_sp;
  return f;
}

}  // namespace qel
