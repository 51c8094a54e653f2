#include "scdt/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "scdt/error.hpp"
#include "scdt/random.hpp"

namespace scdt {

void BoostParams::validate() const {
  if (n_trees < 1) throw Error(ErrorCode::InvalidParams, "n_trees must be at least 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "learning_rate must lie in (0, 1]");
  }
  if (eval_every < 1) throw Error(ErrorCode::InvalidParams, "eval_every must be at least 1");
  tree.validate();
}

double logistic(double margin) {
  if (margin >= 0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

GradHess logloss_grad_hess(double margin, double y) {
  const double p = logistic(margin);
  return {p - y, p * (1.0 - p)};
}

GradHess squared_error_grad_hess(double prediction, double y) { return {prediction - y, 1.0}; }

double evaluate_logloss(std::span<const double> probs, std::span<const double> targets) {
  if (probs.size() != targets.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(probs.size()) + " probabilities for " +
                                               std::to_string(targets.size()) + " targets");
  }
  if (probs.empty()) throw Error(ErrorCode::EmptyDataset, "log-loss of zero rows");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(probs[i], kProbClip, 1.0 - kProbClip);
    total += targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  return -total / static_cast<double>(probs.size());
}

double evaluate_mse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) throw Error(ErrorCode::LengthMismatch, "prediction/target lengths differ");
  if (predictions.empty()) throw Error(ErrorCode::EmptyDataset, "MSE of zero rows");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    total += d * d;
  }
  return total / static_cast<double>(predictions.size());
}

double task_loss(Task task, std::span<const double> predictions, std::span<const double> targets) {
  return task == Task::Binary ? evaluate_logloss(predictions, targets) : evaluate_mse(predictions, targets);
}

double Ensemble::margin(std::span<const LevelId> row) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(row);
  return base_score + learning_rate * sum;
}

std::vector<double> Ensemble::margins(const Design& d) const {
  std::vector<double> out(d.rows);
  std::vector<LevelId> row(d.features.size());
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t f = 0; f < d.features.size(); ++f) row[f] = d.features[f].ids[r];
    out[r] = margin(row);
  }
  return out;
}

std::vector<double> Ensemble::predict(const Design& d) const {
  auto m = margins(d);
  if (task == Task::Binary) {
    for (auto& x : m) x = logistic(x);
  }
  return m;
}

namespace {

std::vector<double> to_outputs(Task task, const std::vector<double>& margins) {
  if (task == Task::Regression) return margins;
  std::vector<double> p(margins.size());
  std::transform(margins.begin(), margins.end(), p.begin(), logistic);
  return p;
}

void add_tree_output(const Tree& tree, const Design& d, double lr, std::vector<double>& margins) {
  std::vector<LevelId> row(d.features.size());
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t f = 0; f < d.features.size(); ++f) row[f] = d.features[f].ids[r];
    margins[r] += lr * tree.predict(row);
  }
}

double initial_margin(Task task, std::span<const double> target) {
  const double n = static_cast<double>(target.size());
  const double mean = std::accumulate(target.begin(), target.end(), 0.0) / n;
  if (task == Task::Regression) return mean;
  if (mean <= 0.0 || mean >= 1.0) {
    // Smoothed mean keeps the log-odds finite.
    const double smoothed = (mean * n + 0.5) / (n + 1.0);
    std::ostringstream msg;
    msg << "DegenerateTarget: training target is constant (" << mean << "); base score uses smoothed mean "
        << smoothed;
    warn(msg.str());
    return std::log(smoothed / (1.0 - smoothed));
  }
  return std::log(mean / (1.0 - mean));
}

}  // namespace

Ensemble fit_ensemble(const Design& train, const Design* valid, const BoostParams& params, PartitionCache& cache,
                      FitReport* report) {
  params.validate();
  if (train.rows == 0) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  if (train.target.size() != train.rows) throw Error(ErrorCode::MisalignedTargets, "training targets missing");
  if (valid && valid->target.size() != valid->rows) {
    throw Error(ErrorCode::MisalignedTargets, "validation targets missing");
  }

  Ensemble model;
  model.task = params.task;
  model.learning_rate = params.learning_rate;
  model.base_score = initial_margin(params.task, train.target);

  std::vector<double> train_margin(train.rows, model.base_score);
  std::vector<double> valid_margin(valid ? valid->rows : 0, model.base_score);
  std::vector<GradHess> gh(train.rows);

  FitReport local;
  FitReport& rep = report ? *report : local;
  rep = FitReport{};
  rep.train_loss_per_tree.push_back(task_loss(params.task, to_outputs(params.task, train_margin), train.target));

  auto record = [&](int iteration) {
    EvalPoint point;
    point.iteration = iteration;
    point.train_loss = rep.train_loss_per_tree.back();
    point.valid_loss = valid ? task_loss(params.task, to_outputs(params.task, valid_margin), valid->target)
                             : std::numeric_limits<double>::quiet_NaN();
    rep.history.push_back(point);
  };
  record(0);

  for (int t = 0; t < params.n_trees; ++t) {
    for (std::size_t r = 0; r < train.rows; ++r) {
      gh[r] = params.task == Task::Binary ? logloss_grad_hess(train_margin[r], train.target[r])
                                          : squared_error_grad_hess(train_margin[r], train.target[r]);
    }
    TreeParams tp = params.tree;
    tp.seed = derive_seed(params.tree.seed, static_cast<std::uint64_t>(t));
    Tree tree = fit_tree(train, gh, tp, cache);
    add_tree_output(tree, train, params.learning_rate, train_margin);
    if (valid) add_tree_output(tree, *valid, params.learning_rate, valid_margin);
    model.trees.push_back(std::move(tree));
    rep.train_loss_per_tree.push_back(task_loss(params.task, to_outputs(params.task, train_margin), train.target));

    const int done = t + 1;
    if (done % params.eval_every == 0 || done == params.n_trees) record(done);
  }

  rep.best_iteration = params.n_trees;
  if (valid) {
    // Earliest iteration attaining the minimum validation loss.
    const auto best = std::min_element(rep.history.begin(), rep.history.end(),
                                       [](const EvalPoint& a, const EvalPoint& b) { return a.valid_loss < b.valid_loss; });
    rep.best_iteration = best->iteration;
    rep.best_valid_loss = best->valid_loss;
    model.trees.resize(static_cast<std::size_t>(rep.best_iteration));
  }
  return model;
}

}  // namespace scdt
