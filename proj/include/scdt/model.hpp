#pragma once

#include <memory>
#include <string>
#include <vector>

#include "scdt/baselines.hpp"
#include "scdt/boosting.hpp"
#include "scdt/dataset.hpp"

namespace scdt {

// Everything needed to score raw CSV rows: schema, fitted preprocessing and the ensemble.
struct Model {
  std::shared_ptr<const FeatureSchema> schema;
  Preprocessor preprocessing;
  Ensemble ensemble;

  std::vector<double> predict(const Dataset& d) const;
};

// {"task", "base_score", "learning_rate", "schema", "preprocessing",
//  "trees": [{"nodes": [{"id", "feature"?, "branches"?: [{"levels", "child"}], "weight"?}]}]}
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace scdt
