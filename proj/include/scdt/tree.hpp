#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "scdt/enumerate.hpp"
#include "scdt/terrain.hpp"

namespace scdt {

// A categorical column ready for tree fitting: level ids plus the terrain over them.
struct EncodedFeature {
  std::string name;
  Terrain terrain;
  std::vector<LevelId> ids;

  int levels() const { return static_cast<int>(terrain.level_names().size()); }
};

// The matrix a tree or ensemble is fitted on. `target` may be empty for prediction-only use.
struct Design {
  std::vector<EncodedFeature> features;
  std::vector<double> target;
  std::size_t rows = 0;

  std::vector<LevelId> row(std::size_t r) const;
};

struct GradHess {
  double grad = 0.0;
  double hess = 0.0;
};

inline constexpr int kSearchAll = 0;

struct TreeParams {
  int max_depth = 3;
  int min_samples_leaf = 1;
  double min_gain = 0.0;
  int max_splits_to_search = kSearchAll;  // per node and feature; kSearchAll evaluates every candidate
  double lambda = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Returned for candidates whose side has no curvature (h + lambda <= 0).
inline constexpr double kSkippedGain = -std::numeric_limits<double>::infinity();

// Second-order gain of a binary split.
double split_gain(double gl, double hl, double gr, double hr, double lambda);
// Same objective for any number of parts; `parts` holds (G, H) per part.
double partition_gain(std::span<const GradHess> parts, double lambda);

struct Branch {
  LevelSet levels;
  int child = -1;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  std::vector<Branch> branches;
  double weight = 0.0;
  // Diagnostics from fitting; not needed for prediction.
  double gain = 0.0;
  std::size_t rows = 0;
  // Level set of `feature` reachable at this node (the restricted universe).
  LevelSet active;

  bool is_leaf() const { return feature < 0; }
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }
  // `row` holds one level id per design feature.
  double predict(std::span<const LevelId> row) const;
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;  // node 0 is the root
};

// Greedy structured categorical tree over gradient/hessian targets.
Tree fit_tree(const Design& design, std::span<const GradHess> targets, const TreeParams& params,
              PartitionCache& cache);

// Candidate splits of `feature` restricted to `active`, in canonical order. Graph terrains go
// through the cache; explicit terrains through the exhaustive search. Exposed for tests.
std::vector<std::vector<LevelSet>> candidate_partitions(const EncodedFeature& feature, LevelSet active,
                                                        PartitionCache& cache);

}  // namespace scdt
