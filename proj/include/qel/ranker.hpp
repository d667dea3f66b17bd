#pragma once

#include <set>
#include <string>
#include <vector>

#include "qel/candgen.hpp"
#include "qel/feature_vector.hpp"

namespace qel {

struct TrainingExample {
  FeatureVector features{};
  double target = 0.0;
  std::size_t query_id = 0;
  std::string anchor;
  std::string entity;
};

// Linear regression scorer trained with L2-regularized L2-loss
// epsilon-insensitive SVR:
//   min_w  w'w/2 + C sum_i max(0, |y_i - w'x_i| - eps)^2
// No bias term; the decision threshold travels with the weights.
struct RegressionModel {
  FeatureVector weights{};
  double C = 1.0;
  double eps = 0.1;
  double threshold = 0.56;
};

struct Interpretation {
  std::set<std::string> entities;
};

// Target 1.0 for gold entities, otherwise the best Jaccard overlap between
// the candidate's and any gold entity's normalized title token sets.
std::vector<TrainingExample> label_candidates(const CandidateSet& cs,
                                              const std::set<std::string>& gold);

// Dual coordinate descent, one pass per epoch in example order, no shrinking
// or permutation, so results are bitwise reproducible. Stops when the largest
// projected-gradient violation drops below 1e-10 (at most 10000 epochs).
std::vector<double> solve_svr_dual(const std::vector<std::vector<double>>& xs,
                                   const std::vector<double>& ys, double C,
                                   double eps);

// Primal objective value; what solve_svr_dual minimizes.
double svr_objective(const std::vector<double>& w,
                     const std::vector<std::vector<double>>& xs,
                     const std::vector<double>& ys, double C, double eps);

RegressionModel train_svr(const std::vector<TrainingExample>& examples,
                          double C, double eps);

double predict(const RegressionModel& model, const FeatureVector& x);
// Errors when x's length is not the weight count.
double predict(const RegressionModel& model, const std::vector<double>& x);

// Entities of all featurized candidates scoring strictly above the threshold.
Interpretation select(const CandidateSet& cs, const RegressionModel& model);

// `QELSVR v1` header, then C, eps, threshold and the weights, one decimal per
// line at 17 significant digits.
void save_model(const RegressionModel& model, const std::string& path);
RegressionModel load_model(const std::string& path);

}  // namespace qel
