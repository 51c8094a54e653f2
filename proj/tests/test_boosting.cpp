#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "scdt/boosting.hpp"
#include "scdt/error.hpp"
#include "scdt/model.hpp"

using namespace scdt;

namespace {

double logloss_at(double margin, double y) {
  const double p = 1.0 / (1.0 + std::exp(-margin));
  return -(y * std::log(p) + (1 - y) * std::log(1 - p));
}

Design separable_design(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Design d;
  d.rows = rows;
  std::vector<LevelId> ids(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    ids[r] = static_cast<LevelId>(rng() % 6);
    d.target.push_back(ids[r] < 3 ? 0.0 : 1.0);
  }
  d.features.push_back({"x", Terrain::graph_induced(builtin_graph(BuiltinKind::Chain, 6)), ids});
  return d;
}

struct WarningCapture {
  std::vector<std::string> messages;
  WarningCapture() {
    set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
};

}  // namespace

TEST_CASE("log-loss gradient and hessian") {
  const auto at0 = logloss_grad_hess(0.0, 1.0);
  CHECK(at0.grad == doctest::Approx(-0.5));
  CHECK(at0.hess == doctest::Approx(0.25));
  const auto far = logloss_grad_hess(40.0, 1.0);
  CHECK(far.grad == doctest::Approx(0.0).epsilon(1e-12));

  // central finite differences of the loss itself
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const double h = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const double m = u(rng);
    const double y = static_cast<double>(i % 2);
    const auto gh = logloss_grad_hess(m, y);
    const double fd_grad = (logloss_at(m + h, y) - logloss_at(m - h, y)) / (2 * h);
    const double fd_hess = (logloss_grad_hess(m + h, y).grad - logloss_grad_hess(m - h, y).grad) / (2 * h);
    CHECK(std::abs(gh.grad - fd_grad) < 1e-6);
    CHECK(std::abs(gh.hess - fd_hess) < 1e-6);
  }
}

TEST_CASE("evaluate_logloss") {
  const std::vector<double> half{0.5, 0.5};
  const std::vector<double> y{0.0, 1.0};
  CHECK(evaluate_logloss(half, y) == doctest::Approx(std::log(2.0)));

  const std::vector<double> exact{0.0, 1.0};
  CHECK(std::isfinite(evaluate_logloss(exact, y)));
  CHECK(evaluate_logloss(exact, y) < 1e-12);
  const std::vector<double> wrong{1.0, 0.0};
  CHECK(evaluate_logloss(wrong, y) == doctest::Approx(-std::log(kProbClip)));

  const std::vector<double> mixed{0.9, 0.2, 0.6};
  const std::vector<double> ym{1.0, 0.0, 0.0};
  CHECK(evaluate_logloss(mixed, ym) ==
        doctest::Approx(-(std::log(0.9) + std::log(0.8) + std::log(0.4)) / 3.0));

  const std::vector<double> short_y{1.0};
  try {
    evaluate_logloss(half, short_y);
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("training loss decreases on separable data") {
  const Design d = separable_design(300, 11);
  PartitionCache cache;
  BoostParams params;
  params.n_trees = 200;
  params.learning_rate = 0.1;
  params.tree.max_depth = 2;
  FitReport report;
  const Ensemble model = fit_ensemble(d, nullptr, params, cache, &report);
  REQUIRE(report.train_loss_per_tree.size() == 201);
  for (std::size_t t = 1; t < report.train_loss_per_tree.size(); ++t) {
    CHECK(report.train_loss_per_tree[t] <= report.train_loss_per_tree[t - 1] + 1e-12);
  }
  CHECK(report.train_loss_per_tree.back() < 0.01);
  CHECK(model.trees.size() == 200);

  // evaluation schedule: 0, every 20 trees, and the last
  REQUIRE(report.history.size() == 11);
  CHECK(report.history.front().iteration == 0);
  CHECK(report.history.back().iteration == 200);
}

TEST_CASE("validation truncates at the best iteration") {
  const Design train = separable_design(200, 1);
  Design valid = separable_design(200, 2);
  for (std::size_t r = 0; r < valid.rows; r += 3) valid.target[r] = 1.0 - valid.target[r];  // noisy labels
  PartitionCache cache;
  BoostParams params;
  params.n_trees = 45;
  params.learning_rate = 0.3;
  params.eval_every = 10;
  FitReport report;
  const Ensemble model = fit_ensemble(train, &valid, params, cache, &report);
  std::vector<int> iterations;
  for (const auto& p : report.history) iterations.push_back(p.iteration);
  CHECK(iterations == std::vector<int>{0, 10, 20, 30, 40, 45});
  double best = report.history.front().valid_loss;
  for (const auto& p : report.history) best = std::min(best, p.valid_loss);
  CHECK(report.best_valid_loss == best);
  CHECK(model.trees.size() == static_cast<std::size_t>(report.best_iteration));
  const auto probs = model.predict(valid);
  CHECK(evaluate_logloss(probs, valid.target) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("degenerate target warns and stays finite") {
  WarningCapture capture;
  Design d = separable_design(50, 3);
  std::fill(d.target.begin(), d.target.end(), 1.0);
  PartitionCache cache;
  BoostParams params;
  params.n_trees = 3;
  const Ensemble model = fit_ensemble(d, nullptr, params, cache);
  REQUIRE(capture.messages.size() == 1);
  CHECK(capture.messages[0].find("DegenerateTarget") != std::string::npos);
  CHECK(model.base_score == doctest::Approx(std::log(50.5 / 0.5)));
  for (double p : model.predict(d)) CHECK(std::isfinite(p));
}

TEST_CASE("predicted probabilities") {
  Ensemble e;
  e.base_score = 0.0;
  const Design d = separable_design(4, 9);
  for (double p : e.predict(d)) CHECK(p == 0.5);
  e.base_score = std::log(3.0);
  for (double p : e.predict(d)) CHECK(p == doctest::Approx(0.75));
  CHECK(logistic(-800.0) >= 0.0);
  CHECK(logistic(800.0) <= 1.0);
}

TEST_CASE("regression task uses squared error") {
  Design d = separable_design(120, 4);
  for (std::size_t r = 0; r < d.rows; ++r) d.target[r] = 2.0 * d.features[0].ids[r] - 1.0;
  PartitionCache cache;
  BoostParams params;
  params.task = Task::Regression;
  params.n_trees = 100;
  params.learning_rate = 0.5;
  params.tree.max_depth = 3;
  FitReport report;
  const Ensemble model = fit_ensemble(d, nullptr, params, cache, &report);
  const double mean = std::accumulate(d.target.begin(), d.target.end(), 0.0) / static_cast<double>(d.rows);
  CHECK(model.base_score == doctest::Approx(mean));
  CHECK(evaluate_mse(model.predict(d), d.target) < 1e-6);
  const auto gh = squared_error_grad_hess(1.5, 1.0);
  CHECK(gh.grad == 0.5);
  CHECK(gh.hess == 1.0);
}

TEST_CASE("parameter validation") {
  BoostParams p;
  p.learning_rate = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = BoostParams{};
  p.n_trees = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = BoostParams{};
  p.tree.max_splits_to_search = -1;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("model save/load is exact") {
  const auto schema = std::make_shared<const FeatureSchema>(parse_schema_json(R"({
    "target": "y", "task": "binary",
    "features": [
      {"name": "county", "kind": "structured", "graph": "builtin:grid:3x3"},
      {"name": "month", "kind": "ordinal_target", "levels": ["a", "b", "c", "d"]},
      {"name": "size", "kind": "numeric", "max_bins": 5}
    ]})"));
  std::mt19937_64 rng(21);
  std::ostringstream csv;
  csv << "county,month,size,y\n";
  const char* months[] = {"a", "b", "c", "d"};
  for (int i = 0; i < 300; ++i) {
    const int c = static_cast<int>(rng() % 9);
    const int m = static_cast<int>(rng() % 4);
    const double s = static_cast<double>(rng() % 1000) / 7.0;
    const bool y = (c % 3 == 0) ^ (m == 2) ^ (rng() % 5 == 0);
    csv << c / 3 << ',' << c % 3 << ',' << months[m] << ',' << s << ',' << y << '\n';
  }
  // grid levels are named "r,c"; quote them
  std::string text = csv.str();
  std::ostringstream fixed;
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  fixed << line << '\n';
  while (std::getline(lines, line)) {
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    fixed << '"' << line.substr(0, second) << '"' << line.substr(second) << '\n';
  }
  std::istringstream in(fixed.str());
  const Dataset data = read_dataset(in, schema);

  Model model;
  model.schema = schema;
  model.preprocessing = Preprocessor::fit(data);
  PartitionCache cache;
  BoostParams params;
  params.n_trees = 30;
  params.tree.max_depth = 3;
  params.tree.max_splits_to_search = 4;
  params.tree.seed = 8;
  model.ensemble = fit_ensemble(model.preprocessing.transform(data), nullptr, params, cache);

  const std::string text1 = model_to_json(model);
  const Model loaded = model_from_json(text1);
  CHECK(model_to_json(loaded) == text1);
  const auto p1 = model.predict(data);
  const auto p2 = loaded.predict(data);
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);

  // refit from scratch is byte-identical
  Model again;
  again.schema = schema;
  again.preprocessing = Preprocessor::fit(data);
  PartitionCache fresh;
  again.ensemble = fit_ensemble(again.preprocessing.transform(data), nullptr, params, fresh);
  CHECK(model_to_json(again) == text1);

  CHECK_THROWS_AS(model_from_json("{\"task\": 3}"), Error);
}
