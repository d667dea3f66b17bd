#include "qel/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>

#include "qel/corpus.hpp"
#include "qel/tokenizer.hpp"
#include "util.hpp"

namespace qel {

namespace {

std::set<std::string> title_token_set(const std::string& title) {
  std::vector<std::string> toks = normalized_tokens(normalize_title(title));
  return {toks.begin(), toks.end()};
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : a)
    if (b.count(t)) ++inter;
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<TrainingExample> label_candidates(const CandidateSet& cs,
                                              const std::set<std::string>& gold) {
  std::vector<std::set<std::string>> gold_tokens;
  gold_tokens.reserve(gold.size());
  for (const auto& g : gold) gold_tokens.push_back(title_token_set(g));

  std::vector<TrainingExample> examples;
  examples.reserve(cs.candidates.size());
  for (const auto& cand : cs.candidates) {
    if (!cand.features)
      throw std::logic_error("candidate `" + cand.entity +
                             "` labeled before feature extraction");
    TrainingExample ex;
    ex.features = *cand.features;
    ex.anchor = cand.anchor;
    ex.entity = cand.entity;
    if (gold.count(cand.entity)) {
      ex.target = 1.0;
    } else {
      std::set<std::string> mine = title_token_set(cand.entity);
      double best = 0.0;
      for (const auto& g : gold_tokens) best = std::max(best, jaccard(mine, g));
      ex.target = best;
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<double> solve_svr_dual(const std::vector<std::vector<double>>& xs,
                                   const std::vector<double>& ys, double C,
                                   double eps) {
  if (xs.empty()) throw std::invalid_argument("no training examples");
  if (xs.size() != ys.size())
    throw std::invalid_argument("feature/target count mismatch");
  const std::size_t n = xs.size();
  const std::size_t dim = xs[0].size();
  for (const auto& x : xs)
    if (x.size() != dim)
      throw std::invalid_argument("inconsistent feature dimensions");

  const double lambda = 0.5 / C;
  std::vector<double> w(dim, 0.0);
  std::vector<double> beta(n, 0.0);
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : xs[i]) s += v * v;
    qd[i] = s;
  }

  const int max_epochs = 10000;
  const double stop_tol = 1e-10;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    double max_violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double g = -ys[i] + lambda * beta[i];
      for (std::size_t d = 0; d < dim; ++d) g += w[d] * xs[i][d];
      double h = qd[i] + lambda;
      double gp = g + eps;
      double gn = g - eps;

      double violation = 0.0;
      if (beta[i] == 0.0) {
        if (gp < 0.0)
          violation = -gp;
        else if (gn > 0.0)
          violation = gn;
      } else if (beta[i] > 0.0) {
        violation = std::fabs(gp);
      } else {
        violation = std::fabs(gn);
      }
      max_violation = std::max(max_violation, violation);

      double d;
      if (gp < h * beta[i])
        d = -gp / h;
      else if (gn > h * beta[i])
        d = -gn / h;
      else
        d = -beta[i];
      if (std::fabs(d) < 1e-12) continue;
      beta[i] += d;
      for (std::size_t k = 0; k < dim; ++k) w[k] += d * xs[i][k];
    }
    if (max_violation < stop_tol) break;
  }
  return w;
}

double svr_objective(const std::vector<double>& w,
                     const std::vector<std::vector<double>>& xs,
                     const std::vector<double>& ys, double C, double eps) {
  double obj = 0.0;
  for (double v : w) obj += v * v;
  obj *= 0.5;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double pred = 0.0;
    for (std::size_t d = 0; d < w.size(); ++d) pred += w[d] * xs[i][d];
    double slack = std::fabs(ys[i] - pred) - eps;
    if (slack > 0.0) obj += C * slack * slack;
  }
  return obj;
}

RegressionModel train_svr(const std::vector<TrainingExample>& examples,
                          double C, double eps) {
  if (examples.empty()) throw std::invalid_argument("no training examples");
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  xs.reserve(examples.size());
  ys.reserve(examples.size());
  for (const auto& ex : examples) {
    xs.emplace_back(ex.features.begin(), ex.features.end());
    ys.push_back(ex.target);
  }
  std::vector<double> w = solve_svr_dual(xs, ys, C, eps);
  RegressionModel model;
  model.C = C;
  model.eps = eps;
  std::copy(w.begin(), w.end(), model.weights.begin());
  return model;
}

double predict(const RegressionModel& model, const FeatureVector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) s += model.weights[i] * x[i];
  return s;
}

double predict(const RegressionModel& model, const std::vector<double>& x) {
  if (x.size() != kFeatureCount)
    throw std::invalid_argument("feature vector has " +
                                std::to_string(x.size()) + " values, expected " +
                                std::to_string(kFeatureCount));
  double s = 0.0;
  for (std::size_t i = 0; i < kFeatureCount; ++i) s += model.weights[i] * x[i];
  return s;
}

Interpretation select(const CandidateSet& cs, const RegressionModel& model) {
  Interpretation out;
  for (const auto& cand : cs.candidates) {
    if (!cand.features)
      throw std::logic_error("candidate `" + cand.entity +
                             "` selected before feature extraction");
    if (predict(model, *cand.features) > model.threshold)
      out.entities.insert(cand.entity);
  }
  return out;
}

void save_model(const RegressionModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "QELSVR v1\n";
  out << detail::format_double(model.C) << '\n';
  out << detail::format_double(model.eps) << '\n';
  out << detail::format_double(model.threshold) << '\n';
  for (double w : model.weights) out << detail::format_double(w) << '\n';
}

RegressionModel load_model(const std::string& path) {
  std::vector<std::string> lines = detail::split_lines(detail::read_file(path));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() != 4 + kFeatureCount || lines[0] != "QELSVR v1")
    throw ParseError(path + ": not a QELSVR v1 model file", 0, 1);
  RegressionModel model;
  try {
    model.C = detail::parse_double(lines[1]);
    model.eps = detail::parse_double(lines[2]);
    model.threshold = detail::parse_double(lines[3]);
    for (std::size_t i = 0; i < kFeatureCount; ++i)
      model.weights[i] = detail::parse_double(lines[4 + i]);
  } catch (const std::exception&) {
    throw ParseError(path + ": malformed model value", 0, 0);
  }
  return model;
}

}  // namespace qel
