#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scdt/dataset.hpp"
#include "scdt/tree.hpp"

namespace scdt {

// One chain:2 indicator column per level ("<feature>=<level>", levels "0"/"1").
// A single-level feature yields no columns (ConstantColumn warning).
std::vector<EncodedFeature> encode_one_hot(const std::string& feature, const std::vector<std::string>& levels,
                                           std::span<const LevelId> ids);

// Levels ranked by ascending training target mean, ties by lower id. Only levels seen in training
// are ranked (a permutation of 0..seen-1); unseen levels borrow the rank of the seen level whose
// mean is closest to the global training mean.
struct OrdinalMap {
  std::vector<double> means;    // per level; NaN when unseen
  std::vector<std::size_t> counts;
  std::vector<int> rank;        // per level
  std::vector<LevelId> by_rank; // seen levels in rank order
  double global_mean = 0.0;

  int seen() const { return static_cast<int>(by_rank.size()); }
};

OrdinalMap fit_ordinal(int levels, std::span<const LevelId> ids, std::span<const double> target);
// Replacement column over a chain of ranks; level names are the original names in rank order.
EncodedFeature encode_ordinal(const std::string& feature, const std::vector<std::string>& levels,
                              const OrdinalMap& map, std::span<const LevelId> ids);

// Empirical target mean per combination of categorical levels, global-mean fallback.
class SiloedTable {
 public:
  struct Cell {
    std::size_t count = 0;
    double mean = 0.0;
  };

  static SiloedTable fit(const std::vector<std::span<const LevelId>>& columns, std::span<const double> target);

  double predict(std::span<const LevelId> combination) const;
  std::vector<double> predict(const std::vector<std::span<const LevelId>>& columns) const;
  double global_mean() const { return global_mean_; }
  const std::map<std::vector<LevelId>, Cell>& cells() const { return cells_; }

 private:
  std::map<std::vector<LevelId>, Cell> cells_;
  double global_mean_ = 0.0;
};

SiloedTable fit_siloed(const Dataset& train);

// Turns schema columns into tree-ready features according to each feature's kind. Fitted on the
// training rows only; the fitted state travels with the model under "preprocessing".
class Preprocessor {
 public:
  static Preprocessor fit(const Dataset& train);

  Design transform(const Dataset& d) const;
  // Design feature names and level names, in design order.
  const std::vector<EncodedFeature>& design_template() const { return template_; }

  nlohmann::json to_json() const;
  static Preprocessor from_json(const nlohmann::json& doc, std::shared_ptr<const FeatureSchema> schema);

 private:
  struct Step {
    int source = -1;  // schema feature index
    FeatureKind kind = FeatureKind::Structured;
    OrdinalMap ordinal;
    NumericBinning binning;
    bool dropped = false;
  };

  void build_template();

  std::shared_ptr<const FeatureSchema> schema_;
  std::vector<Step> steps_;
  std::vector<EncodedFeature> template_;  // ids left empty
};

}  // namespace scdt
