// Command-line front end: enumerate, train, predict, bench, synth.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "scdt/baselines.hpp"
#include "scdt/bench.hpp"
#include "scdt/boosting.hpp"
#include "scdt/enumerate.hpp"
#include "scdt/error.hpp"
#include "scdt/model.hpp"

namespace {

using namespace scdt;
using json = nlohmann::json;

struct EnumerateArgs {
  std::string graph;
  std::string mode = "mp";
  bool list = false;
  bool table = false;
};

struct TreeArgs {
  int max_depth = 3;
  int n_trees = 100;
  double learning_rate = 0.1;
  int max_splits_to_search = kSearchAll;
  int eval_every = 20;
  int min_samples_leaf = 1;
  double min_gain = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

struct TrainArgs {
  std::string data, schema, valid, model_out, cache;
  TreeArgs tree;
};

struct PredictArgs {
  std::string model, data, out;
};

struct SynthArgs {
  SyntheticRainConfig config;
  std::string data_out, schema_out, truth_out;
};

struct BenchArgs {
  BenchConfig config;
  std::string out, cache;
};

void add_tree_flags(CLI::App* cmd, TreeArgs& t) {
  cmd->add_option("--max-depth", t.max_depth, "Maximum tree depth")->capture_default_str();
  cmd->add_option("--n-trees", t.n_trees, "Number of boosting rounds")->capture_default_str();
  cmd->add_option("--learning-rate", t.learning_rate, "Shrinkage applied to each tree")->capture_default_str();
  cmd->add_option("--max-splits-to-search", t.max_splits_to_search,
                  "Candidate splits sampled per node and feature (0 = all)")
      ->capture_default_str();
  cmd->add_option("--eval-every", t.eval_every, "Evaluate validation loss every N trees")->capture_default_str();
  cmd->add_option("--min-samples-leaf", t.min_samples_leaf, "Minimum rows in every child")->capture_default_str();
  cmd->add_option("--min-gain", t.min_gain, "Minimum gain required to split")->capture_default_str();
  cmd->add_option("--lambda", t.lambda, "L2 regularization on leaf weights")->capture_default_str();
  cmd->add_option("--seed", t.seed, "Seed for split subsampling")->capture_default_str();
}

BoostParams boost_params(const TreeArgs& t, Task task) {
  BoostParams p;
  p.n_trees = t.n_trees;
  p.learning_rate = t.learning_rate;
  p.eval_every = t.eval_every;
  p.task = task;
  p.tree.max_depth = t.max_depth;
  p.tree.min_samples_leaf = t.min_samples_leaf;
  p.tree.min_gain = t.min_gain;
  p.tree.max_splits_to_search = t.max_splits_to_search;
  p.tree.lambda = t.lambda;
  p.tree.seed = t.seed;
  return p;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

json names_json(const LevelGraph& g, LevelSet s) {
  json out = json::array();
  s.for_each([&](LevelId v) { out.push_back(g.level_name(v)); });
  return out;
}

int run_enumerate(const EnumerateArgs& a) {
  const LevelGraph g = load_graph(a.graph);
  const int half = g.size() / 2;
  if (a.table) {
    std::cout << "name\tV\tE\tMP\tCS_half\tCS\n"
              << g.name() << '\t' << g.size() << '\t' << g.edges().size() << '\t'
              << maximally_coarse_partitions(g).size() << '\t' << count_connected_sets(g, half) << '\t'
              << count_connected_sets(g, kUnlimited) << '\n';
    return 0;
  }
  if (a.mode == "mp") {
    const auto mp = maximally_coarse_partitions(g);
    if (!a.list) {
      std::cout << mp.size() << '\n';
      return 0;
    }
    for (const auto& c : mp) std::cout << json::array({names_json(g, c.side_a), names_json(g, c.side_b)}).dump() << '\n';
    return 0;
  }
  const int max_size = a.mode == "cs_half" ? half : kUnlimited;
  if (!a.list) {
    std::cout << count_connected_sets(g, max_size) << '\n';
    return 0;
  }
  for_each_connected_set(g, max_size, [&](LevelSet s) { std::cout << names_json(g, s).dump() << '\n'; });
  return 0;
}

int run_train(const TrainArgs& a) {
  auto schema = std::make_shared<const FeatureSchema>(load_schema(a.schema));
  const Dataset train = load_dataset(a.data, schema);
  std::optional<Dataset> valid;
  if (!a.valid.empty()) valid = load_dataset(a.valid, schema);

  PartitionCache cache;
  if (!a.cache.empty() && std::ifstream(a.cache)) cache.load(a.cache);

  Model model;
  model.schema = schema;
  model.preprocessing = Preprocessor::fit(train);
  const Design train_d = model.preprocessing.transform(train);
  std::optional<Design> valid_d;
  if (valid) valid_d = model.preprocessing.transform(*valid);

  FitReport report;
  model.ensemble = fit_ensemble(train_d, valid_d ? &*valid_d : nullptr, boost_params(a.tree, schema->task), cache,
                                &report);
  save_model(model, a.model_out);
  if (!a.cache.empty()) cache.save(a.cache);

  const char* metric = schema->task == Task::Binary ? "logloss" : "mse";
  const double train_loss = task_loss(schema->task, model.ensemble.predict(train_d), train_d.target);
  std::cout << "trees=" << model.ensemble.trees.size() << " train_" << metric << '=' << format_number(train_loss);
  if (valid_d) {
    std::cout << " valid_" << metric << '=' << format_number(report.best_valid_loss)
              << " best_iteration=" << report.best_iteration;
  }
  std::cout << '\n';
  return 0;
}

int run_predict(const PredictArgs& a) {
  const Model model = load_model(a.model);
  Dataset data;
  try {
    data = load_dataset(a.data, model.schema, TargetPolicy::Optional);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnknownLevel) throw;
    throw Error(ErrorCode::UnknownLevelAtPredict, e.what());
  }
  const Design design = model.preprocessing.transform(data);

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& out = a.out.empty() ? std::cout : file;
  const bool binary = model.ensemble.task == Task::Binary;
  out << "row," << (binary ? "probability" : "prediction") << '\n';
  for (std::size_t r = 0; r < design.rows; ++r) {
    double m = 0.0;
    try {
      m = model.ensemble.margin(design.row(r));
    } catch (const Error& e) {
      throw Error(e.code(), "row " + std::to_string(r) + ": " + e.what());
    }
    out << r << ',' << format_number(binary ? logistic(m) : m) << '\n';
  }
  return 0;
}

void add_generator_flags(CLI::App* cmd, SyntheticRainConfig& c) {
  cmd->add_option("--county-graph", c.county_graph, "County graph: builtin spec or graph JSON")->capture_default_str();
  cmd->add_option("--smoothness", c.smoothness, "Smoothing passes over the county field")->capture_default_str();
  cmd->add_option("--amplitude", c.amplitude, "Seasonal amplitude on the log-odds scale")->capture_default_str();
  cmd->add_option("--spatial-scale", c.spatial_scale, "Standard deviation of the county effect")
      ->capture_default_str();
  cmd->add_option("--intercept", c.intercept, "Base log-odds")->capture_default_str();
  cmd->add_option("--phase", c.phase, "Seasonal phase in radians")->capture_default_str();
  cmd->add_option("--data-seed", c.seed, "Generator seed")->capture_default_str();
  cmd->add_option("--n-rows", c.n_rows, "Rows to generate")->capture_default_str();
}

int run_synth(const SynthArgs& a) {
  const SyntheticData s = generate_synthetic(a.config);
  auto data = open_out(a.data_out);
  write_dataset_csv(s.data, data);
  if (!a.schema_out.empty()) open_out(a.schema_out) << schema_to_json(*s.data.schema) << '\n';
  if (!a.truth_out.empty()) {
    auto truth = open_out(a.truth_out);
    write_truth_csv(s, truth);
  }
  return 0;
}

int run_bench_cmd(const BenchArgs& a) {
  const auto& c = a.config;
  std::cerr << "bench: county_graph=" << c.data.county_graph << " n_rows=" << c.data.n_rows
            << " repeats=" << c.repeats << " n_trees=" << c.n_trees << " learning_rate=" << c.learning_rate
            << " eval_every=" << c.eval_every << " max_splits_to_search=" << c.max_splits_to_search
            << " jobs=" << c.jobs << '\n';
  PartitionCache cache;
  if (!a.cache.empty() && std::ifstream(a.cache)) cache.load(a.cache);
  const auto rows = run_bench(c, cache);
  if (!a.cache.empty()) cache.save(a.cache);
  if (a.out.empty()) {
    write_bench_csv(rows, std::cout);
  } else {
    auto out = open_out(a.out);
    write_bench_csv(rows, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured categorical decision trees"};
  app.require_subcommand(1);

  EnumerateArgs en;
  auto* enumerate = app.add_subcommand("enumerate", "Count or list connected sets and binary splits of a graph");
  enumerate->add_option("--graph", en.graph, "builtin:chain:N, builtin:cycle:N, builtin:grid:RxC or a graph JSON")
      ->required();
  enumerate->add_option("--mode", en.mode, "mp: both-sides-connected splits; cs: connected sets; cs_half: those of "
                                           "size <= |V|/2")
      ->check(CLI::IsMember({"mp", "cs", "cs_half"}))
      ->capture_default_str();
  auto* list_flag = enumerate->add_flag("--list", en.list, "Print every item, one JSON array per line");
  enumerate->add_flag("--count", "Print the number of items (default)")->excludes(list_flag);
  enumerate->add_flag("--table", en.table, "Print name, |V|, |E| and all three counts")->excludes(list_flag);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "Fit a boosted structured-tree model");
  train->add_option("--data", tr.data, "Training CSV")->required();
  train->add_option("--schema", tr.schema, "Feature schema JSON")->required();
  train->add_option("--valid", tr.valid, "Validation CSV; enables best-iteration truncation");
  train->add_option("--model-out", tr.model_out, "Where to write the model JSON")->required();
  train->add_option("--cache", tr.cache, "Partition cache file, loaded if present and rewritten after training");
  add_tree_flags(train, tr.tree);

  PredictArgs pr;
  auto* predict = app.add_subcommand("predict", "Score a CSV with a saved model");
  predict->add_option("--model", pr.model, "Model JSON")->required();
  predict->add_option("--data", pr.data, "CSV with the model's feature columns")->required();
  predict->add_option("--out", pr.out, "Output CSV (default: stdout)");

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Write a synthetic county/month rain dataset");
  add_generator_flags(synth, sy.config);
  synth->add_option("--data-out", sy.data_out, "Dataset CSV")->required();
  synth->add_option("--schema-out", sy.schema_out, "Schema JSON");
  synth->add_option("--truth-out", sy.truth_out, "True probability per county and month");

  BenchArgs be;
  TreeArgs bench_tree;
  bench_tree.n_trees = be.config.n_trees;
  bench_tree.learning_rate = be.config.learning_rate;
  bench_tree.max_splits_to_search = be.config.max_splits_to_search;
  auto* bench = app.add_subcommand("bench", "Compare one_hot, ordinal, structured and siloed on synthetic data");
  add_generator_flags(bench, be.config.data);
  bench->add_option("--sizes", be.config.sizes, "Training sizes, ascending")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", be.config.repeats, "Train/test randomizations per size")->capture_default_str();
  bench->add_option("--repeat-seed", be.config.repeat_seed, "Seed of the first repeat")->capture_default_str();
  bench->add_option("--methods", be.config.methods, "Methods to compare")->delimiter(',')->capture_default_str();
  bench->add_option("--depths", be.config.depths, "Tree depths to sweep")->delimiter(',')->capture_default_str();
  bench->add_option("--test-fraction", be.config.test_fraction, "Held-out share of the pool")->capture_default_str();
  bench->add_option("--jobs", be.config.jobs, "Worker threads")->capture_default_str();
  bench->add_option("--out", be.out, "Results CSV (default: stdout)");
  bench->add_option("--cache", be.cache, "Partition cache file");
  bench->add_option("--n-trees", bench_tree.n_trees, "Number of boosting rounds")->capture_default_str();
  bench->add_option("--learning-rate", bench_tree.learning_rate, "Shrinkage")->capture_default_str();
  bench->add_option("--max-splits-to-search", bench_tree.max_splits_to_search,
                    "Sampled candidates per node and feature for the structured method (0 = all)")
      ->capture_default_str();
  bench->add_option("--eval-every", bench_tree.eval_every, "Evaluate test loss every N trees")->capture_default_str();
  bench->add_option("--min-samples-leaf", bench_tree.min_samples_leaf, "Minimum rows per child")->capture_default_str();
  bench->add_option("--min-gain", bench_tree.min_gain, "Minimum gain to split")->capture_default_str();
  bench->add_option("--lambda", bench_tree.lambda, "L2 regularization on leaf weights")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*enumerate) return run_enumerate(en);
    if (*train) return run_train(tr);
    if (*predict) return run_predict(pr);
    if (*synth) return run_synth(sy);
    be.config.n_trees = bench_tree.n_trees;
    be.config.learning_rate = bench_tree.learning_rate;
    be.config.max_splits_to_search = bench_tree.max_splits_to_search;
    be.config.eval_every = bench_tree.eval_every;
    be.config.min_samples_leaf = bench_tree.min_samples_leaf;
    be.config.min_gain = bench_tree.min_gain;
    be.config.lambda = bench_tree.lambda;
    return run_bench_cmd(be);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
