#pragma once

#include <span>
#include <string>
#include <vector>

#include "scdt/dataset.hpp"
#include "scdt/tree.hpp"

namespace scdt {

struct BoostParams {
  int n_trees = 100;
  double learning_rate = 0.1;
  int eval_every = 20;
  TreeParams tree;
  Task task = Task::Binary;

  void validate() const;
};

// Gradient and hessian of the log-loss with respect to the margin.
GradHess logloss_grad_hess(double margin, double y);
GradHess squared_error_grad_hess(double prediction, double y);

inline constexpr double kProbClip = 1e-15;

double logistic(double margin);
double evaluate_logloss(std::span<const double> probs, std::span<const double> targets);
double evaluate_mse(std::span<const double> predictions, std::span<const double> targets);

// Additive model: margin = base_score + learning_rate * sum of tree outputs.
struct Ensemble {
  Task task = Task::Binary;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;

  double margin(std::span<const LevelId> row) const;
  std::vector<double> margins(const Design& d) const;
  // Probabilities for binary models, raw predictions for regression.
  std::vector<double> predict(const Design& d) const;
};

struct EvalPoint {
  int iteration = 0;  // trees in the model when evaluated
  double train_loss = 0.0;
  double valid_loss = 0.0;  // NaN without validation data
};

struct FitReport {
  std::vector<EvalPoint> history;
  int best_iteration = 0;
  double best_valid_loss = 0.0;
  std::vector<double> train_loss_per_tree;  // after each tree, index 0 = base model
};

// Boosts trees on `train`. With `valid`, the validation loss is recorded every eval_every trees
// (and after the last) and the returned model is truncated at the best iteration.
Ensemble fit_ensemble(const Design& train, const Design* valid, const BoostParams& params, PartitionCache& cache,
                      FitReport* report = nullptr);

double task_loss(Task task, std::span<const double> predictions, std::span<const double> targets);

}  // namespace scdt
