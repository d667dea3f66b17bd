// qel: build artifacts from an annotated corpus, train and tune the
// candidate ranker, link queries, and score annotations.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qel/eval.hpp"
#include "qel/features.hpp"
#include "qel/pipeline.hpp"
#include "qel/ranker.hpp"
#include "util.hpp"

namespace {

struct CommonFlags {
  std::string config;
  qel::PipelineConfig flags;
  bool print_config = false;

  CLI::Option* config_opt = nullptr;
  CLI::Option* corpus_opt = nullptr;
  CLI::Option* index_opt = nullptr;
  CLI::Option* stats_opt = nullptr;
  CLI::Option* emb_opt = nullptr;
  CLI::Option* model_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* thr_opt = nullptr;
  CLI::Option* c_opt = nullptr;
  CLI::Option* eps_opt = nullptr;
  CLI::Option* workers_opt = nullptr;

  void attach(CLI::App* cmd) {
    config_opt = cmd->add_option("--config", config, "key=value settings file");
    corpus_opt =
        cmd->add_option("--corpus-path", flags.corpus_path, "annotated corpus TSV");
    index_opt =
        cmd->add_option("--index-path", flags.index_path, "index artifact file");
    stats_opt = cmd->add_option("--stats-path", flags.stats_path,
                                "anchor statistics file prefix");
    emb_opt = cmd->add_option("--embeddings-path", flags.embeddings_path,
                              "word vector file (optional)");
    model_opt = cmd->add_option("--model-path", flags.model_path, "model file");
    k_opt = cmd->add_option("--k", flags.k, "sentences retrieved per query");
    thr_opt =
        cmd->add_option("--threshold", flags.threshold, "selection threshold");
    c_opt = cmd->add_option("--c", flags.c, "SVR regularization constant");
    eps_opt = cmd->add_option("--eps", flags.eps, "SVR epsilon");
    workers_opt = cmd->add_option("--workers", flags.workers, "worker threads");
    cmd->add_flag("--print-config", print_config,
                  "print resolved settings and exit");
  }

  // Flag beats config file beats built-in default. `threshold_defaulted`
  // reports that neither a flag nor the file set the threshold, in which
  // case link/tune fall back to the value stored in the model.
  qel::PipelineConfig resolve(bool* threshold_defaulted = nullptr) const {
    qel::PipelineConfig cfg;
    bool file_set_threshold = false;
    if (config_opt->count()) {
      double default_threshold = cfg.threshold;
      cfg.threshold = std::numeric_limits<double>::quiet_NaN();
      cfg = qel::load_config_file(config, cfg);
      file_set_threshold = !std::isnan(cfg.threshold);
      if (!file_set_threshold) cfg.threshold = default_threshold;
    }
    if (corpus_opt->count()) cfg.corpus_path = flags.corpus_path;
    if (index_opt->count()) cfg.index_path = flags.index_path;
    if (stats_opt->count()) cfg.stats_path = flags.stats_path;
    if (emb_opt->count()) cfg.embeddings_path = flags.embeddings_path;
    if (model_opt->count()) cfg.model_path = flags.model_path;
    if (k_opt->count()) cfg.k = flags.k;
    if (thr_opt->count()) cfg.threshold = flags.threshold;
    if (c_opt->count()) cfg.c = flags.c;
    if (eps_opt->count()) cfg.eps = flags.eps;
    if (workers_opt->count()) cfg.workers = flags.workers;
    if (threshold_defaulted)
      *threshold_defaulted = !thr_opt->count() && !file_set_threshold;
    qel::validate_config(cfg);
    return cfg;
  }
};

void dump_config(const qel::PipelineConfig& cfg) {
  std::cout << "corpus_path=" << cfg.corpus_path << '\n'
            << "index_path=" << cfg.index_path << '\n'
            << "stats_path=" << cfg.stats_path << '\n'
            << "embeddings_path=" << cfg.embeddings_path << '\n'
            << "model_path=" << cfg.model_path << '\n'
            << "k=" << cfg.k << '\n'
            << "threshold=" << qel::detail::format_double(cfg.threshold) << '\n'
            << "c=" << qel::detail::format_double(cfg.c) << '\n'
            << "eps=" << qel::detail::format_double(cfg.eps) << '\n'
            << "workers=" << cfg.workers << '\n';
}

qel::EmbeddingTable load_embeddings_if_set(const qel::PipelineConfig& cfg) {
  if (cfg.embeddings_path.empty()) return {};
  std::vector<std::string> warnings;
  qel::EmbeddingTable emb = qel::load_embeddings(cfg.embeddings_path, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return emb;
}

qel::RegressionModel load_model_for(const qel::PipelineConfig& cfg,
                                    bool threshold_defaulted) {
  if (cfg.model_path.empty()) throw qel::ConfigError("model_path is not set");
  qel::RegressionModel model = qel::load_model(cfg.model_path);
  if (!threshold_defaulted) model.threshold = cfg.threshold;
  return model;
}

std::string join_entities(const std::set<std::string>& entities) {
  std::string out;
  for (const auto& e : entities) {
    if (!out.empty()) out += ';';
    out += e;
  }
  return out;
}

template <typename T>
std::vector<T> parse_grid(const std::string& csv, const char* flag) {
  std::vector<T> grid;
  for (const auto& piece : qel::detail::split_fields(csv, ',')) {
    if (piece.empty()) continue;
    try {
      if constexpr (std::is_integral_v<T>)
        grid.push_back(static_cast<T>(qel::detail::parse_u64(piece)));
      else
        grid.push_back(qel::detail::parse_double(piece));
    } catch (const std::exception&) {
      throw qel::ConfigError(std::string("bad ") + flag + " value `" + piece +
                             "`");
    }
  }
  return grid;
}

int run_build(const CommonFlags& f) {
  qel::PipelineConfig cfg = f.resolve();
  if (f.print_config) {
    dump_config(cfg);
    return 0;
  }
  if (cfg.corpus_path.empty()) throw qel::ConfigError("corpus_path is not set");
  qel::Artifacts artifacts = qel::build_artifacts(cfg);
  qel::save_artifacts(artifacts, cfg);
  std::cout << "indexed " << artifacts.index.doc_count() << " sentences, "
            << artifacts.index.postings().size() << " terms, "
            << artifacts.stats.link.size() << " anchors\n"
            << "wrote " << cfg.index_path << ", " << cfg.stats_path
            << ".anchors, " << cfg.stats_path << ".pairs\n";
  return 0;
}

int run_train(const CommonFlags& f, const std::string& dataset_path) {
  qel::PipelineConfig cfg = f.resolve();
  if (f.print_config) {
    dump_config(cfg);
    return 0;
  }
  if (cfg.model_path.empty()) throw qel::ConfigError("model_path is not set");
  qel::Artifacts artifacts = qel::load_artifacts(cfg);
  qel::EmbeddingTable emb = load_embeddings_if_set(cfg);
  std::vector<qel::GoldQuery> dataset = qel::load_dataset(dataset_path);
  std::vector<qel::TrainingExample> examples =
      qel::collect_examples(artifacts, emb, dataset, cfg.k, cfg.workers);
  if (examples.empty())
    throw std::runtime_error(dataset_path +
                             ": no query produced any training candidate");
  qel::RegressionModel model = qel::train_svr(examples, cfg.c, cfg.eps);
  model.threshold = cfg.threshold;
  qel::save_model(model, cfg.model_path);
  std::cout << "trained on " << examples.size() << " candidates from "
            << dataset.size() << " queries -> " << cfg.model_path << '\n';
  return 0;
}

int run_tune(const CommonFlags& f, const std::string& dataset_path,
             const std::string& k_grid_csv, const std::string& t_grid_csv) {
  bool threshold_defaulted = false;
  qel::PipelineConfig cfg = f.resolve(&threshold_defaulted);
  if (f.print_config) {
    dump_config(cfg);
    return 0;
  }
  qel::Artifacts artifacts = qel::load_artifacts(cfg);
  qel::EmbeddingTable emb = load_embeddings_if_set(cfg);
  qel::RegressionModel model = load_model_for(cfg, threshold_defaulted);

  std::vector<std::uint64_t> k_grid = k_grid_csv.empty()
                                          ? std::vector<std::uint64_t>{cfg.k}
                                          : parse_grid<std::uint64_t>(
                                                k_grid_csv, "--k-grid");
  std::vector<double> t_grid =
      t_grid_csv.empty() ? std::vector<double>{model.threshold}
                         : parse_grid<double>(t_grid_csv, "--threshold-grid");

  std::vector<qel::GoldQuery> dev = qel::load_dataset(dataset_path);
  qel::TuneResult result = qel::tune_grid(artifacts, emb, model, dev, k_grid,
                                          t_grid, cfg.workers);
  for (const qel::TuneCell& cell : result.grid)
    std::cout << cell.k << '\t' << qel::detail::format_double(cell.threshold)
              << '\t' << qel::detail::format_double(cell.f1) << '\n';
  std::cout << "# best k=" << result.best.k
            << " threshold=" << qel::detail::format_double(result.best.threshold)
            << " f1=" << qel::detail::format_double(result.best.f1) << '\n';
  return 0;
}

int run_link(const CommonFlags& f, const std::string& queries_path,
             bool explain, const std::string& output_path) {
  bool threshold_defaulted = false;
  qel::PipelineConfig cfg = f.resolve(&threshold_defaulted);
  if (f.print_config) {
    dump_config(cfg);
    return 0;
  }
  qel::Artifacts artifacts = qel::load_artifacts(cfg);
  qel::EmbeddingTable emb = load_embeddings_if_set(cfg);
  qel::RegressionModel model = load_model_for(cfg, threshold_defaulted);
  std::vector<std::string> queries = qel::load_queries(queries_path);

  std::vector<qel::LinkResult> results(queries.size());
  qel::detail::parallel_for(queries.size(), cfg.workers, [&](std::size_t i) {
    results[i] = qel::link_query(artifacts, emb, model, queries[i], cfg.k);
  });

  std::ofstream file;
  if (!output_path.empty()) {
    file.open(output_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + output_path);
  }
  std::ostream& out = output_path.empty() ? std::cout : file;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const qel::LinkResult& r = results[i];
    out << queries[i] << '\t' << join_entities(r.selected.entities) << '\n';
    if (!explain) continue;
    for (std::size_t j = 0; j < r.candidates.candidates.size(); ++j) {
      const qel::Candidate& cand = r.candidates.candidates[j];
      out << "# " << cand.anchor << " -> " << cand.entity
          << " score=" << qel::detail::format_double(r.scores[j])
          << " w=" << cand.w
          << " sc=" << qel::detail::format_double(cand.sc) << " support=";
      for (std::size_t s = 0; s < cand.support.size(); ++s) {
        if (s) out << ',';
        out << cand.support[s];
      }
      out << '\n';
    }
  }
  return 0;
}

int run_eval(const CommonFlags& f, const std::string& gold_path,
             const std::string& annotations_path) {
  qel::PipelineConfig cfg = f.resolve();
  if (f.print_config) {
    dump_config(cfg);
    return 0;
  }
  (void)cfg;
  std::vector<qel::GoldQuery> gold = qel::load_dataset(gold_path);
  std::vector<qel::GoldQuery> annotations = qel::load_dataset(annotations_path);
  if (gold.size() != annotations.size())
    throw std::invalid_argument(gold_path + " has " +
                                std::to_string(gold.size()) + " queries but " +
                                annotations_path + " has " +
                                std::to_string(annotations.size()));
  std::vector<qel::Interpretation> outputs;
  outputs.reserve(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (annotations[i].query != gold[i].query)
      throw std::invalid_argument("query mismatch at entry " +
                                  std::to_string(i + 1) + ": `" +
                                  gold[i].query + "` vs `" +
                                  annotations[i].query + "`");
    outputs.push_back({annotations[i].gold});
  }
  qel::EvalReport report = qel::average_f1(gold, outputs);
  std::cout << qel::format_report(report);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "# summary: %zu queries, precision %.4f, recall %.4f, f1 %.4f\n",
                gold.size(), report.average_precision, report.average_recall,
                report.average_f1);
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entity linker for web queries over an annotated sentence corpus"};
  app.require_subcommand(1);

  CLI::App* build = app.add_subcommand("build", "index a corpus, write artifacts");
  CommonFlags build_flags;
  build_flags.attach(build);

  CLI::App* train = app.add_subcommand("train", "train the candidate ranker");
  CommonFlags train_flags;
  train_flags.attach(train);
  std::string train_dataset;
  train->add_option("dataset", train_dataset, "gold TSV: query \\t e1;e2;...")
      ->required();

  CLI::App* tune = app.add_subcommand("tune", "grid-search k and threshold");
  CommonFlags tune_flags;
  tune_flags.attach(tune);
  std::string tune_dataset, k_grid_csv, t_grid_csv;
  tune->add_option("dataset", tune_dataset, "development gold TSV")->required();
  tune->add_option("--k-grid", k_grid_csv, "comma-separated k values");
  tune->add_option("--threshold-grid", t_grid_csv,
                   "comma-separated threshold values");

  CLI::App* link = app.add_subcommand("link", "annotate queries with entities");
  CommonFlags link_flags;
  link_flags.attach(link);
  std::string queries_path, link_output;
  bool explain = false;
  link->add_option("queries", queries_path, "one query per line")->required();
  link->add_flag("--explain", explain, "append per-candidate detail lines");
  link->add_option("--output", link_output, "write annotations to a file");

  CLI::App* eval = app.add_subcommand("eval", "score annotations against gold");
  CommonFlags eval_flags;
  eval_flags.attach(eval);
  std::string gold_path, annotations_path;
  eval->add_option("gold", gold_path, "gold TSV")->required();
  eval->add_option("annotations", annotations_path, "annotations TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(build)) return run_build(build_flags);
    if (app.got_subcommand(train)) return run_train(train_flags, train_dataset);
    if (app.got_subcommand(tune))
      return run_tune(tune_flags, tune_dataset, k_grid_csv, t_grid_csv);
    if (app.got_subcommand(link))
      return run_link(link_flags, queries_path, explain, link_output);
    if (app.got_subcommand(eval))
      return run_eval(eval_flags, gold_path, annotations_path);
    return 1;
  } catch (const qel::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const qel::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
