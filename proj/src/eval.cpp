#include "qel/eval.hpp"

#include <stdexcept>

#include "qel/corpus.hpp"
#include "qel/tokenizer.hpp"
#include "util.hpp"

namespace qel {

QueryMetrics query_f1(const std::set<std::string>& gold,
                      const std::set<std::string>& hypothesis) {
  std::size_t inter = 0;
  for (const auto& e : hypothesis)
    if (gold.count(e)) ++inter;

  QueryMetrics m;
  m.precision = hypothesis.empty()
                    ? 1.0
                    : static_cast<double>(inter) /
                          static_cast<double>(hypothesis.size());
  m.recall = gold.empty() ? 1.0
                          : static_cast<double>(inter) /
                                static_cast<double>(gold.size());
  m.f1 = (m.precision + m.recall == 0.0)
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

EvalReport average_f1(const std::vector<GoldQuery>& dataset,
                      const std::vector<Interpretation>& outputs) {
  if (dataset.size() != outputs.size())
    throw std::invalid_argument("dataset has " + std::to_string(dataset.size()) +
                                " queries but outputs has " +
                                std::to_string(outputs.size()));
  if (dataset.empty()) throw std::invalid_argument("empty dataset");

  EvalReport report;
  report.per_query.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    QueryMetrics m = query_f1(dataset[i].gold, outputs[i].entities);
    report.average_precision += m.precision;
    report.average_recall += m.recall;
    report.average_f1 += m.f1;
    report.per_query.push_back(m);
  }
  double n = static_cast<double>(dataset.size());
  report.average_precision /= n;
  report.average_recall /= n;
  report.average_f1 /= n;
  return report;
}

std::vector<GoldQuery> load_dataset(const std::string& path) {
  std::vector<std::string> lines = detail::split_lines(detail::read_file(path));
  std::vector<GoldQuery> dataset;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = detail::split_fields(line, '\t');
    if (fields.size() != 2)
      throw ParseError(path + ": expected `query \\t entities`", 0,
                       static_cast<long>(i + 1));
    GoldQuery gq;
    gq.query = fields[0];
    for (const auto& piece : detail::split_fields(fields[1], ';')) {
      std::string entity = normalize_title(piece);
      if (!entity.empty()) gq.gold.insert(entity);
    }
    dataset.push_back(std::move(gq));
  }
  return dataset;
}

std::string format_report(const EvalReport& report) {
  std::string out = "query\tprecision\trecall\tf1\n";
  for (std::size_t i = 0; i < report.per_query.size(); ++i) {
    const QueryMetrics& m = report.per_query[i];
    out += std::to_string(i);
    out += '\t';
    out += detail::format_double(m.precision);
    out += '\t';
    out += detail::format_double(m.recall);
    out += '\t';
    out += detail::format_double(m.f1);
    out += '\n';
  }
  out += "average_precision\t" + detail::format_double(report.average_precision) + "\n";
  out += "average_recall\t" + detail::format_double(report.average_recall) + "\n";
  out += "average_f1\t" + detail::format_double(report.average_f1) + "\n";
  return out;
}

}  // namespace qel
