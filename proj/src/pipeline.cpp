#include "qel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qel/tokenizer.hpp"
#include "util.hpp"

namespace qel {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

PipelineConfig load_config_file(const std::string& path,
                                const PipelineConfig& base) {
  PipelineConfig cfg = base;
  std::vector<std::string> lines = detail::split_lines(detail::read_file(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    std::size_t sep = line.find('=');
    if (sep == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(i + 1) +
                        ": expected key=value");
    std::string key = trim(line.substr(0, sep));
    std::string value = trim(line.substr(sep + 1));
    try {
      if (key == "corpus_path")
        cfg.corpus_path = value;
      else if (key == "index_path")
        cfg.index_path = value;
      else if (key == "stats_path")
        cfg.stats_path = value;
      else if (key == "embeddings_path")
        cfg.embeddings_path = value;
      else if (key == "model_path")
        cfg.model_path = value;
      else if (key == "k")
        cfg.k = detail::parse_u64(value);
      else if (key == "threshold")
        cfg.threshold = detail::parse_double(value);
      else if (key == "c")
        cfg.c = detail::parse_double(value);
      else if (key == "eps")
        cfg.eps = detail::parse_double(value);
      else if (key == "workers")
        cfg.workers = detail::parse_u64(value);
      else
        throw ConfigError(path + ":" + std::to_string(i + 1) +
                          ": unknown config key `" + key + "`");
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(path + ":" + std::to_string(i + 1) + ": bad value for `" +
                        key + "`");
    }
  }
  return cfg;
}

void validate_config(const PipelineConfig& config) {
  if (config.k < 1) throw ConfigError("k must be at least 1");
  if (!std::isfinite(config.threshold))
    throw ConfigError("threshold must be finite");
  if (!(config.c > 0.0)) throw ConfigError("c must be positive");
  if (!(config.eps >= 0.0)) throw ConfigError("eps must be non-negative");
  if (config.workers < 1) throw ConfigError("workers must be at least 1");
}

Artifacts build_artifacts(const PipelineConfig& config) {
  Corpus corpus = load_corpus(config.corpus_path, config.workers);
  Artifacts artifacts;
  artifacts.index = Index::build(corpus);
  artifacts.stats = compute_link_stats(corpus, config.workers);
  artifacts.resources = build_entity_resources(corpus);
  return artifacts;
}

void save_index_container(const Index& index, const EntityResources& resources,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "QELIDX v1\n";

  const auto& postings = index.postings();
  out << "terms " << postings.size() << '\n';
  for (const auto& [term, plist] : postings) {
    (void)plist;
    out << term << '\n';
  }
  out << "postings " << postings.size() << '\n';
  for (const auto& [term, plist] : postings) {
    (void)term;
    for (std::size_t i = 0; i < plist.size(); ++i) {
      if (i) out << ' ';
      out << plist[i].sentence_id << ':' << plist[i].tf;
    }
    out << '\n';
  }

  out << "documents " << index.doc_count() << '\n';
  for (SentenceId id = 0; id < index.doc_count(); ++id) {
    const AnnotatedSentence& sent = index.sentence(id);
    out << sent.page_title << '\t' << kind_name(sent.kind) << '\t'
        << reinsert_markup(sent) << '\n';
  }

  out << "first_sentence " << resources.first_sentence.size() << '\n';
  for (const auto& [entity, text] : resources.first_sentence)
    out << entity << '\t' << text << '\n';
  out << "disamb_desc " << resources.disamb_desc.size() << '\n';
  for (const auto& [entity, text] : resources.disamb_desc)
    out << entity << '\t' << text << '\n';
  out << "entity_pages " << resources.entity_pages.size() << '\n';
  for (const auto& [entity, pages] : resources.entity_pages) {
    out << entity;
    for (const auto& page : pages) out << '\t' << page;
    out << '\n';
  }
}

namespace {

struct ContainerReader {
  const std::string& path;
  std::vector<std::string> lines;
  std::size_t pos = 0;

  ParseError fail(const std::string& msg) const {
    return ParseError(path + ": " + msg, 0, static_cast<long>(pos + 1));
  }
  const std::string& next(const char* what) {
    if (pos >= lines.size())
      throw ParseError(path + ": truncated file, expected " + std::string(what),
                       0, static_cast<long>(lines.size()));
    return lines[pos++];
  }
  // `<name> <count>` section header
  std::uint64_t section(const std::string& name) {
    const std::string& line = next(name.c_str());
    std::vector<std::string> fields = detail::split_fields(line, ' ');
    if (fields.size() != 2 || fields[0] != name)
      throw fail("expected `" + name + " <count>` section header");
    try {
      return detail::parse_u64(fields[1]);
    } catch (const std::exception&) {
      throw fail("bad count in `" + name + "` header");
    }
  }
};

}  // namespace

std::pair<Index, EntityResources> load_index_container(const std::string& path) {
  ContainerReader r{path, detail::split_lines(detail::read_file(path))};
  while (!r.lines.empty() && r.lines.back().empty()) r.lines.pop_back();

  if (r.next("header") != "QELIDX v1")
    throw ParseError(path + ": not a QELIDX v1 file", 0, 1);

  std::uint64_t term_count = r.section("terms");
  std::vector<std::string> terms;
  terms.reserve(term_count);
  for (std::uint64_t i = 0; i < term_count; ++i) terms.push_back(r.next("term"));

  std::uint64_t posting_count = r.section("postings");
  if (posting_count != term_count)
    throw r.fail("postings section count differs from terms section");
  std::map<std::string, std::vector<Posting>> postings;
  for (std::uint64_t i = 0; i < posting_count; ++i) {
    const std::string& line = r.next("postings line");
    std::vector<Posting> plist;
    for (const auto& piece : detail::split_fields(line, ' ')) {
      if (piece.empty()) throw r.fail("empty posting entry");
      std::size_t colon = piece.find(':');
      if (colon == std::string::npos) throw r.fail("posting entry missing `:`");
      try {
        std::uint64_t id = detail::parse_u64(piece.substr(0, colon));
        std::uint64_t tf = detail::parse_u64(piece.substr(colon + 1));
        plist.push_back({static_cast<SentenceId>(id),
                         static_cast<std::uint32_t>(tf)});
      } catch (const std::exception&) {
        throw r.fail("bad posting entry `" + piece + "`");
      }
    }
    if (!postings.emplace(terms[i], std::move(plist)).second)
      throw r.fail("duplicate term `" + terms[i] + "`");
  }

  std::uint64_t doc_count = r.section("documents");
  std::vector<AnnotatedSentence> store;
  store.reserve(doc_count);
  for (std::uint64_t i = 0; i < doc_count; ++i) {
    const std::string& line = r.next("document line");
    std::vector<std::string> fields = detail::split_fields(line, '\t');
    if (fields.size() != 3) throw r.fail("document line needs 3 tab fields");
    try {
      SentenceKind kind = parse_kind(fields[1]);
      store.push_back(parse_annotated_sentence(fields[0], fields[2], kind));
    } catch (const ParseError& e) {
      throw r.fail(std::string("bad document line: ") + e.what());
    }
  }

  EntityResources res;
  std::uint64_t n = r.section("first_sentence");
  for (std::uint64_t i = 0; i < n; ++i) {
    std::vector<std::string> fields = detail::split_fields(r.next("entry"), '\t');
    if (fields.size() != 2) throw r.fail("first_sentence entry needs 2 fields");
    res.first_sentence[fields[0]] = fields[1];
  }
  n = r.section("disamb_desc");
  for (std::uint64_t i = 0; i < n; ++i) {
    std::vector<std::string> fields = detail::split_fields(r.next("entry"), '\t');
    if (fields.size() != 2) throw r.fail("disamb_desc entry needs 2 fields");
    res.disamb_desc[fields[0]] = fields[1];
  }
  n = r.section("entity_pages");
  for (std::uint64_t i = 0; i < n; ++i) {
    std::vector<std::string> fields = detail::split_fields(r.next("entry"), '\t');
    if (fields.empty() || fields[0].empty())
      throw r.fail("entity_pages entry needs an entity");
    res.entity_pages[fields[0]] =
        std::vector<std::string>(fields.begin() + 1, fields.end());
  }
  if (r.pos != r.lines.size()) throw r.fail("trailing content after sections");

  return {Index::from_parts(std::move(postings), std::move(store)),
          std::move(res)};
}

void save_artifacts(const Artifacts& artifacts, const PipelineConfig& config) {
  if (config.index_path.empty()) throw ConfigError("index_path is not set");
  if (config.stats_path.empty()) throw ConfigError("stats_path is not set");
  save_index_container(artifacts.index, artifacts.resources, config.index_path);
  save_link_stats(artifacts.stats, config.stats_path);
}

Artifacts load_artifacts(const PipelineConfig& config) {
  if (config.index_path.empty()) throw ConfigError("index_path is not set");
  if (config.stats_path.empty()) throw ConfigError("stats_path is not set");
  Artifacts artifacts;
  auto [index, resources] = load_index_container(config.index_path);
  artifacts.index = std::move(index);
  artifacts.resources = std::move(resources);
  artifacts.stats = load_link_stats(config.stats_path);
  return artifacts;
}

CandidateSet generate_candidates(const Index& index, const std::string& query,
                                 std::uint64_t k) {
  std::vector<ScoredSentence> results =
      index.search(query, static_cast<std::size_t>(k));
  CandidateSet cs = partition_candidates(extract_pairs(results), query);
  cs = prune_long_string(std::move(cs));
  cs = prune_title_match(std::move(cs), query);
  return cs;
}

void featurize(CandidateSet& cs, const LinkStats& stats,
               const EntityResources& resources, const EmbeddingTable& emb) {
  std::vector<FeatureVector> vectors;
  vectors.reserve(cs.candidates.size());
  for (const Candidate& cand : cs.candidates)
    vectors.push_back(
        extract_features(cand, cs, cs.query, stats, resources, emb));
  for (std::size_t i = 0; i < cs.candidates.size(); ++i)
    cs.candidates[i].features = vectors[i];
}

LinkResult link_query(const Artifacts& artifacts, const EmbeddingTable& emb,
                      const RegressionModel& model, const std::string& query,
                      std::uint64_t k) {
  LinkResult result;
  result.candidates = generate_candidates(artifacts.index, query, k);
  featurize(result.candidates, artifacts.stats, artifacts.resources, emb);
  result.scores.reserve(result.candidates.candidates.size());
  for (const Candidate& cand : result.candidates.candidates)
    result.scores.push_back(predict(model, *cand.features));
  result.selected = select(result.candidates, model);
  return result;
}

std::vector<TrainingExample> collect_examples(const Artifacts& artifacts,
                                              const EmbeddingTable& emb,
                                              const std::vector<GoldQuery>& dataset,
                                              std::uint64_t k,
                                              std::size_t workers) {
  std::vector<std::vector<TrainingExample>> per_query(dataset.size());
  detail::parallel_for(dataset.size(), workers, [&](std::size_t i) {
    CandidateSet cs = generate_candidates(artifacts.index, dataset[i].query, k);
    featurize(cs, artifacts.stats, artifacts.resources, emb);
    per_query[i] = label_candidates(cs, dataset[i].gold);
    for (auto& ex : per_query[i]) ex.query_id = i;
  });
  std::vector<TrainingExample> pooled;
  for (auto& examples : per_query)
    for (auto& ex : examples) pooled.push_back(std::move(ex));
  return pooled;
}

TuneResult tune_grid(const Artifacts& artifacts, const EmbeddingTable& emb,
                     const RegressionModel& model,
                     const std::vector<GoldQuery>& dev,
                     std::vector<std::uint64_t> k_grid,
                     std::vector<double> threshold_grid, std::size_t workers) {
  std::sort(k_grid.begin(), k_grid.end());
  k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());
  std::sort(threshold_grid.begin(), threshold_grid.end());
  threshold_grid.erase(
      std::unique(threshold_grid.begin(), threshold_grid.end()),
      threshold_grid.end());
  if (k_grid.empty() || threshold_grid.empty())
    throw ConfigError("tuning grid is empty");
  if (dev.empty()) throw std::invalid_argument("empty dev dataset");

  TuneResult result;
  bool have_best = false;
  for (std::uint64_t k : k_grid) {
    // Candidate scores depend on k only, so score once per query and sweep
    // the thresholds over the cached scores.
    std::vector<std::vector<std::pair<std::string, double>>> scored(dev.size());
    detail::parallel_for(dev.size(), workers, [&](std::size_t i) {
      CandidateSet cs = generate_candidates(artifacts.index, dev[i].query, k);
      featurize(cs, artifacts.stats, artifacts.resources, emb);
      for (const Candidate& cand : cs.candidates)
        scored[i].emplace_back(cand.entity, predict(model, *cand.features));
    });
    for (double threshold : threshold_grid) {
      std::vector<Interpretation> outputs(dev.size());
      for (std::size_t i = 0; i < dev.size(); ++i)
        for (const auto& [entity, score] : scored[i])
          if (score > threshold) outputs[i].entities.insert(entity);
      TuneCell cell;
      cell.k = k;
      cell.threshold = threshold;
      cell.f1 = average_f1(dev, outputs).average_f1;
      result.grid.push_back(cell);
      if (!have_best || cell.f1 > result.best.f1) {
        result.best = cell;
        have_best = true;
      }
    }
  }
  return result;
}

std::vector<std::string> load_queries(const std::string& path) {
  std::vector<std::string> lines = detail::split_lines(detail::read_file(path));
  std::vector<std::string> queries;
  for (const auto& line : lines) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    queries.push_back(tab == std::string::npos ? line : line.substr(0, tab));
  }
  return queries;
}

}  // namespace qel
