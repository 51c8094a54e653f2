#include "scdt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>

#include "scdt/baselines.hpp"
#include "scdt/boosting.hpp"
#include "scdt/error.hpp"
#include "scdt/random.hpp"

namespace scdt {

namespace {

const std::vector<std::string> kMonths{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                       "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

const std::vector<std::string> kMethods{"one_hot", "ordinal", "structured", "siloed"};

}  // namespace

void SyntheticRainConfig::validate() const {
  if (smoothness < 0) throw Error(ErrorCode::InvalidConfig, "smoothness must be non-negative");
  if (n_rows < 2) throw Error(ErrorCode::InvalidConfig, "n_rows must be at least 2");
  for (double v : {amplitude, spatial_scale, intercept, phase}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "generator parameters must be finite");
  }
}

LevelGraph month_graph() {
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t m = 0; m < kMonths.size(); ++m) edges.emplace_back(kMonths[m], kMonths[(m + 1) % kMonths.size()]);
  return build_graph("month", kMonths, edges);
}

double SyntheticData::true_probability(std::size_t row) const {
  return truth[static_cast<std::size_t>(data.categorical[0][row])][static_cast<std::size_t>(data.categorical[1][row])];
}

SyntheticData generate_synthetic(const SyntheticRainConfig& config) {
  config.validate();
  LevelGraph counties = [&] {
    try {
      return load_graph(config.county_graph);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidConfig, std::string("county graph: ") + e.what());
    }
  }();
  const auto nc = static_cast<std::size_t>(counties.size());

  Rng field_rng(derive_seed(config.seed, 1));
  std::vector<double> field(nc);
  for (auto& v : field) v = field_rng.normal();
  for (int pass = 0; pass < config.smoothness; ++pass) {
    std::vector<double> next(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      double sum = field[c];
      int count = 1;
      counties.neighbors(static_cast<LevelId>(c)).for_each([&](LevelId u) {
        sum += field[static_cast<std::size_t>(u)];
        ++count;
      });
      next[c] = sum / count;
    }
    field = std::move(next);
  }
  double mean = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(nc);
  double var = 0.0;
  for (double v : field) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(nc));
  for (auto& v : field) v = sd > 0 ? (v - mean) / sd * config.spatial_scale : 0.0;

  SyntheticData out;
  out.truth.assign(nc, std::vector<double>(kMonths.size()));
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t m = 0; m < kMonths.size(); ++m) {
      const double season = config.amplitude * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) / 12.0 +
                                                        config.phase);
      out.truth[c][m] = 1.0 / (1.0 + std::exp(-(config.intercept + field[c] + season)));
    }
  }

  auto schema = std::make_shared<FeatureSchema>();
  schema->target = "rain";
  schema->task = Task::Binary;
  FeatureSpec county{"county", FeatureKind::Structured, 32, counties.levels(), Terrain::graph_induced(counties)};
  FeatureSpec month{"month", FeatureKind::Structured, 32, kMonths, Terrain::graph_induced(month_graph())};
  schema->features = {std::move(county), std::move(month)};

  Dataset& d = out.data;
  d.schema = schema;
  d.rows = config.n_rows;
  d.categorical.assign(2, {});
  d.numeric.assign(2, {});
  d.categorical[0].reserve(d.rows);
  d.categorical[1].reserve(d.rows);
  d.target.reserve(d.rows);
  Rng row_rng(derive_seed(config.seed, 2));
  for (std::size_t r = 0; r < d.rows; ++r) {
    const auto c = static_cast<LevelId>(row_rng.below(nc));
    const auto m = static_cast<LevelId>(row_rng.below(kMonths.size()));
    d.categorical[0].push_back(c);
    d.categorical[1].push_back(m);
    d.target.push_back(row_rng.uniform() < out.truth[static_cast<std::size_t>(c)][static_cast<std::size_t>(m)] ? 1.0
                                                                                                                : 0.0);
  }
  return out;
}

void write_truth_csv(const SyntheticData& s, std::ostream& out) {
  const auto& spec = s.data.schema->features;
  out << "county,month,p\n";
  for (std::size_t c = 0; c < s.truth.size(); ++c) {
    for (std::size_t m = 0; m < s.truth[c].size(); ++m) {
      out << csv_escape(spec[0].levels[c]) << ',' << csv_escape(spec[1].levels[m]) << ',' << format_number(s.truth[c][m]) << '\n';
    }
  }
}

std::shared_ptr<const FeatureSchema> method_schema(const FeatureSchema& base, const std::string& method) {
  auto schema = std::make_shared<FeatureSchema>(base);
  for (auto& f : schema->features) {
    if (method == "structured" || method == "siloed") continue;
    if (method == "one_hot") {
      f.kind = FeatureKind::OneHot;
    } else if (method == "ordinal") {
      // Cyclic variables keep their declared order (Jan=1 .. Dec=12); everything else is ranked by target mean.
      f.kind = f.name == "month" ? FeatureKind::OrdinalDeclared : FeatureKind::OrdinalTarget;
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown method '" + method + "'");
    }
    f.terrain.reset();
  }
  return schema;
}

double optimal_logloss(const SyntheticData& s, const Dataset& rows) {
  std::vector<double> p(rows.rows);
  for (std::size_t r = 0; r < rows.rows; ++r) {
    p[r] = s.truth[static_cast<std::size_t>(rows.categorical[0][r])][static_cast<std::size_t>(rows.categorical[1][r])];
  }
  return evaluate_logloss(p, rows.target);
}

void BenchConfig::validate() const {
  data.validate();
  if (sizes.empty()) throw Error(ErrorCode::InvalidConfig, "no training sizes given");
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw Error(ErrorCode::InvalidConfig, "sizes must be ascending");
  if (sizes.front() == 0) throw Error(ErrorCode::InvalidConfig, "training sizes must be positive");
  if (repeats < 1) throw Error(ErrorCode::InvalidConfig, "repeats must be at least 1");
  if (methods.empty()) throw Error(ErrorCode::InvalidConfig, "no methods given");
  for (const auto& m : methods) {
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
      throw Error(ErrorCode::InvalidConfig, "unknown method '" + m + "'");
    }
  }
  if (depths.empty()) throw Error(ErrorCode::InvalidConfig, "no depths given");
  if (jobs < 1) throw Error(ErrorCode::InvalidConfig, "jobs must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error(ErrorCode::InvalidConfig, "test_fraction in (0,1)");
  const auto train_rows = data.n_rows - static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(data.n_rows)));
  if (sizes.back() > train_rows) {
    throw Error(ErrorCode::InvalidConfig, "largest size " + std::to_string(sizes.back()) + " exceeds the " +
                                              std::to_string(train_rows) + " training rows available");
  }
}

namespace {

struct Cell {
  std::string method;
  std::size_t size = 0;
  int depth = 0;
  int repeat = 0;
  double logloss = 0.0;
  int best_iteration = 0;
};

struct Split {
  Dataset train_pool;
  Dataset test;
};

Dataset head(const Dataset& d, std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return d.subset(rows);
}

void run_cell(Cell& cell, const BenchConfig& config, const Split& split, PartitionCache& cache) {
  const Dataset train = head(split.train_pool, cell.size);
  if (cell.method == "siloed") {
    const SiloedTable table = fit_siloed(train);
    std::vector<std::span<const LevelId>> cols{split.test.categorical[0], split.test.categorical[1]};
    cell.logloss = evaluate_logloss(table.predict(cols), split.test.target);
    return;
  }
  const auto schema = method_schema(*train.schema, cell.method);
  const Dataset train_m = train.with_schema(schema);
  const Dataset test_m = split.test.with_schema(schema);
  const Preprocessor prep = Preprocessor::fit(train_m);
  const Design train_d = prep.transform(train_m);
  const Design test_d = prep.transform(test_m);

  BoostParams params;
  params.n_trees = config.n_trees;
  params.learning_rate = config.learning_rate;
  params.eval_every = config.eval_every;
  params.task = Task::Binary;
  params.tree.max_depth = cell.depth;
  params.tree.min_samples_leaf = config.min_samples_leaf;
  params.tree.min_gain = config.min_gain;
  params.tree.lambda = config.lambda;
  params.tree.max_splits_to_search = cell.method == "structured" ? config.max_splits_to_search : kSearchAll;
  params.tree.seed = derive_seed(config.repeat_seed + static_cast<std::uint64_t>(cell.repeat), cell.size,
                                 static_cast<std::uint64_t>(cell.depth));
  FitReport report;
  fit_ensemble(train_d, &test_d, params, cache, &report);
  cell.logloss = report.best_valid_loss;
  cell.best_iteration = report.best_iteration;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config, PartitionCache& cache) {
  config.validate();
  const SyntheticData synth = generate_synthetic(config.data);

  std::vector<Split> splits;
  for (int r = 0; r < config.repeats; ++r) {
    auto [train, test] = split_train_test(synth.data, config.test_fraction,
                                          derive_seed(config.repeat_seed + static_cast<std::uint64_t>(r), 0x5e1));
    splits.push_back({std::move(train), std::move(test)});
  }

  std::vector<Cell> cells;
  for (const auto& method : config.methods) {
    for (auto size : config.sizes) {
      const std::vector<int> depths = method == "siloed" ? std::vector<int>{0} : config.depths;
      for (int depth : depths) {
        for (int r = 0; r < config.repeats; ++r) cells.push_back({method, size, depth, r, 0.0, 0});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      run_cell(cells[i], config, splits[static_cast<std::size_t>(cells[i].repeat)], cache);
    }
  };
  const int threads = std::min<int>(config.jobs, static_cast<int>(cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<BenchRow> rows;
  std::size_t i = 0;
  while (i < cells.size()) {
    const Cell& first = cells[i];
    double sum = 0.0;
    for (int r = 0; r < config.repeats; ++r, ++i) {
      const Cell& c = cells[i];
      rows.push_back({c.method, c.size, c.repeat, c.logloss, c.best_iteration, c.depth});
      sum += c.logloss;
    }
    rows.push_back({first.method, first.size, -1, sum / config.repeats, 0, first.depth});
  }

  for (auto size : config.sizes) {
    double sum = 0.0;
    for (int r = 0; r < config.repeats; ++r) {
      const double ll = optimal_logloss(synth, splits[static_cast<std::size_t>(r)].test);
      rows.push_back({"optimal", size, r, ll, 0, 0});
      sum += ll;
    }
    rows.push_back({"optimal", size, -1, sum / config.repeats, 0, 0});
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "method,size,repeat,logloss,best_iteration,max_depth\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.size << ',' << (r.repeat < 0 ? std::string("mean") : std::to_string(r.repeat)) << ','
        << format_number(r.logloss) << ',' << r.best_iteration << ',' << r.max_depth << '\n';
  }
}

}  // namespace scdt
