#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "scdt/dataset.hpp"
#include "scdt/tree.hpp"

namespace scdt {

// Rain-like data over (county, month) with known truth:
//   p*(county, month) = logistic(intercept + field[county] + amplitude * cos(2*pi*month/12 + phase))
// where field is iid N(0,1) noise smoothed over the county graph `smoothness` times, then
// standardized and scaled by spatial_scale.
struct SyntheticRainConfig {
  std::string county_graph = "builtin:grid:4x5";
  int smoothness = 8;
  double amplitude = 1.0;
  double spatial_scale = 1.0;
  double intercept = -1.0;
  double phase = 0.0;
  std::uint64_t seed = 1;
  std::size_t n_rows = 20000;

  void validate() const;
};

struct SyntheticData {
  Dataset data;                            // columns: county, month; target: rain
  std::vector<std::vector<double>> truth;  // truth[county][month]

  double true_probability(std::size_t row) const;
};

LevelGraph month_graph();  // cycle over Jan..Dec
SyntheticData generate_synthetic(const SyntheticRainConfig& config);
void write_truth_csv(const SyntheticData& s, std::ostream& out);

// Schemas for the compared treatments of the same two columns.
std::shared_ptr<const FeatureSchema> method_schema(const FeatureSchema& base, const std::string& method);

// Log-loss of the generating probabilities on the given rows.
double optimal_logloss(const SyntheticData& s, const Dataset& rows);

struct BenchConfig {
  SyntheticRainConfig data;
  std::vector<std::size_t> sizes{500, 2000};
  int repeats = 3;
  std::uint64_t repeat_seed = 1;  // repeat r uses repeat_seed + r
  std::vector<std::string> methods{"one_hot", "ordinal", "structured", "siloed"};
  std::vector<int> depths{2, 3};
  int n_trees = 300;
  double learning_rate = 0.05;
  int eval_every = 20;
  int max_splits_to_search = 20;  // structured method only
  int min_samples_leaf = 1;
  double min_gain = 0.0;
  double lambda = 0.0;
  double test_fraction = 0.4;
  int jobs = 1;

  void validate() const;
};

struct BenchRow {
  std::string method;
  std::size_t size = 0;
  int repeat = -1;  // -1 marks the mean over repeats
  double logloss = 0.0;
  int best_iteration = 0;
  int max_depth = 0;  // 0 where depth does not apply
};

// Per-repeat rows for every (method, size, depth, repeat) cell plus "mean" rows, and an
// "optimal" method computed from the generator's probabilities. Canonical order regardless of jobs.
std::vector<BenchRow> run_bench(const BenchConfig& config, PartitionCache& cache);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace scdt
