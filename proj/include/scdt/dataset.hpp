#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scdt/graph.hpp"
#include "scdt/terrain.hpp"

namespace scdt {

enum class Task { Binary, Regression };

enum class FeatureKind {
  Structured,      // terrain from a graph or an explicit member list
  OneHot,          // one chain:2 indicator per level
  OrdinalTarget,   // levels ranked by training target mean, then treated as a chain
  OrdinalDeclared, // levels as a chain in declared order (e.g. Jan=1 .. Dec=12)
  Numeric,         // real values, binned onto a chain
};

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);
std::string to_string(Task task);
Task task_from_string(const std::string& s);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Structured;
  int max_bins = 32;  // numeric only

  // Categorical features: declared level names (ids are positions).
  std::vector<std::string> levels;
  // Structured features: graph- or explicit-member terrain over `levels`.
  std::optional<Terrain> terrain;

  bool is_categorical() const { return kind != FeatureKind::Numeric; }
};

struct FeatureSchema {
  std::string target;
  Task task = Task::Binary;
  std::vector<FeatureSpec> features;

  int index_of(const std::string& feature) const;  // -1 if absent
};

// {"target": str, "task": "binary"|"regression",
//  "features": [{"name", "kind", "graph"?, "terrain"?, "levels"?, "max_bins"?}]}
// "graph"/"terrain" may be a builtin spec, a path (relative to base_dir) or an inline object.
FeatureSchema parse_schema_json(const std::string& text, const std::string& base_dir = ".");
FeatureSchema load_schema(const std::string& path);
// Self-contained form: graphs and terrains are written inline.
std::string schema_to_json(const FeatureSchema& schema);

// Columnar data. Categorical columns hold level ids, numeric columns hold reals; the other
// vector for a feature is empty. Immutable once loaded.
struct Dataset {
  std::shared_ptr<const FeatureSchema> schema;
  std::vector<std::vector<LevelId>> categorical;
  std::vector<std::vector<double>> numeric;
  std::vector<double> target;  // empty when loaded without targets
  std::size_t rows = 0;

  std::size_t size() const { return rows; }
  bool has_target() const { return !target.empty(); }
  Dataset subset(const std::vector<std::size_t>& row_ids) const;
  // Same columns under another schema with identical feature names and level lists.
  Dataset with_schema(std::shared_ptr<const FeatureSchema> other) const;
};

enum class TargetPolicy { Required, Optional };

Dataset load_dataset(const std::string& csv_path, std::shared_ptr<const FeatureSchema> schema,
                     TargetPolicy policy = TargetPolicy::Required);
Dataset read_dataset(std::istream& in, std::shared_ptr<const FeatureSchema> schema,
                     TargetPolicy policy = TargetPolicy::Required);
void write_dataset_csv(const Dataset& d, std::ostream& out);

// Chain binning of a numeric column: bin(x) = number of cut points strictly below x.
struct NumericBinning {
  std::vector<double> cuts;       // ascending; bins = cuts.size() + 1
  std::vector<std::string> names;
  std::vector<LevelId> ids;       // training column mapped to bins

  int bins() const { return static_cast<int>(cuts.size()) + 1; }
  LevelId bin_of(double x) const;  // out-of-range values clamp to the end bins
  LevelGraph chain(const std::string& name) const;
};

// One bin per distinct value when there are at most max_bins of them, otherwise quantile bins.
NumericBinning bin_numeric(const std::vector<double>& values, int max_bins);
NumericBinning binning_from_cuts(std::vector<double> cuts);

// Disjoint, exhaustive, reproducible row split; returns (train, test).
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double test_fraction, std::uint64_t seed);

std::string format_number(double x);
// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& s);

}  // namespace scdt
