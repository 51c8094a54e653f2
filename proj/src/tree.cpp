#include "scdt/tree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "scdt/error.hpp"
#include "scdt/random.hpp"

namespace scdt {

std::vector<LevelId> Design::row(std::size_t r) const {
  std::vector<LevelId> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.ids[r]);
  return out;
}

void TreeParams::validate() const {
  if (max_depth < 1) throw Error(ErrorCode::InvalidParams, "max_depth must be at least 1");
  if (min_samples_leaf < 1) throw Error(ErrorCode::InvalidParams, "min_samples_leaf must be at least 1");
  if (!(min_gain >= 0.0)) throw Error(ErrorCode::InvalidParams, "min_gain must be non-negative");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidParams, "lambda must be non-negative");
  if (max_splits_to_search < 0) throw Error(ErrorCode::InvalidParams, "max_splits_to_search must be >= 0");
}

double split_gain(double gl, double hl, double gr, double hr, double lambda) {
  if (hl + lambda <= 0.0 || hr + lambda <= 0.0) return kSkippedGain;
  const double g = gl + gr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (hl + hr + lambda));
}

double partition_gain(std::span<const GradHess> parts, double lambda) {
  double g = 0.0, h = 0.0, score = 0.0;
  for (const auto& p : parts) {
    if (p.hess + lambda <= 0.0) return kSkippedGain;
    score += p.grad * p.grad / (p.hess + lambda);
    g += p.grad;
    h += p.hess;
  }
  return 0.5 * (score - g * g / (h + lambda));
}

double Tree::predict(std::span<const LevelId> row) const {
  if (nodes_.empty()) return 0.0;
  int id = 0;
  while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    const LevelId level = row[static_cast<std::size_t>(node.feature)];
    int next = -1;
    for (const auto& b : node.branches) {
      if (b.levels.contains(level)) {
        next = b.child;
        break;
      }
    }
    if (next < 0) {
      throw Error(ErrorCode::UnknownLevelAtPredict,
                  "level id " + std::to_string(level) + " is not routed by node " + std::to_string(id));
    }
    id = next;
  }
  return nodes_[static_cast<std::size_t>(id)].weight;
}

int Tree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (const auto& b : nodes_[i].branches) {
      d[static_cast<std::size_t>(b.child)] = d[i] + 1;
      best = std::max(best, d[i] + 1);
    }
  }
  return best;
}

std::vector<std::vector<LevelSet>> candidate_partitions(const EncodedFeature& feature, LevelSet active,
                                                        PartitionCache& cache) {
  std::vector<std::vector<LevelSet>> out;
  if (active.size() < 2) return out;
  const Terrain& t = feature.terrain;
  if (t.is_graph_induced()) {
    const LevelGraph sub = active == t.universe() ? t.graph() : induced_subgraph(t.graph(), active);
    const auto entry = cache.lookup_or_enumerate(sub);
    out.reserve(entry->size());
    for (const auto& c : *entry) out.push_back({expand_into(c.side_a, active), expand_into(c.side_b, active)});
  } else {
    const Terrain restricted = active == t.universe() ? t : restrict(t, active);
    for (const auto& p : maximally_coarse_partitions_explicit(restricted)) out.push_back(p.parts());
  }
  return out;
}

namespace {

struct LevelStats {
  double grad = 0.0;
  double hess = 0.0;
  std::size_t count = 0;
};

struct Choice {
  int feature = -1;
  double gain = kSkippedGain;
  std::vector<LevelSet> parts;
};

class TreeBuilder {
 public:
  TreeBuilder(const Design& design, std::span<const GradHess> targets, const TreeParams& params,
              PartitionCache& cache)
      : design_(design), targets_(targets), params_(params), cache_(cache) {}

  Tree build() {
    std::vector<std::size_t> rows(design_.rows);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<LevelSet> active;
    for (const auto& f : design_.features) active.push_back(f.terrain.universe());
    grow(rows, active, 0);
    return Tree(std::move(nodes_));
  }

 private:
  const std::vector<std::vector<LevelSet>>& candidates(std::size_t f, LevelSet active) {
    auto key = std::make_pair(f, active.bits());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(key, candidate_partitions(design_.features[f], active, cache_)).first->second;
  }

  int grow(const std::vector<std::size_t>& rows, const std::vector<LevelSet>& active, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    double g = 0.0, h = 0.0;
    for (auto r : rows) {
      g += targets_[r].grad;
      h += targets_[r].hess;
    }
    {
      auto& node = nodes_.back();
      node.rows = rows.size();
      node.weight = h + params_.lambda > 0.0 ? -g / (h + params_.lambda) : 0.0;
    }

    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    if (depth >= params_.max_depth || rows.size() < 2 * min_leaf) return id;

    const Choice best = choose_split(rows, active, g, h, id);
    // Gains within rounding noise of zero are treated as no improvement.
    const double parent_score = h + params_.lambda > 0.0 ? g * g / (h + params_.lambda) : 0.0;
    const double noise = 1e-12 * (1.0 + std::abs(parent_score));
    if (best.feature < 0 || best.gain <= params_.min_gain || best.gain <= noise) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    const auto& column = design_.features[f].ids;
    std::vector<std::vector<std::size_t>> child_rows(best.parts.size());
    for (auto r : rows) {
      const LevelId level = column[r];
      for (std::size_t q = 0; q < best.parts.size(); ++q) {
        if (best.parts[q].contains(level)) {
          child_rows[q].push_back(r);
          break;
        }
      }
    }

    nodes_[static_cast<std::size_t>(id)].feature = best.feature;
    nodes_[static_cast<std::size_t>(id)].gain = best.gain;
    nodes_[static_cast<std::size_t>(id)].active = active[f];
    for (std::size_t q = 0; q < best.parts.size(); ++q) {
      std::vector<LevelSet> child_active = active;
      child_active[f] = best.parts[q];
      const int child = grow(child_rows[q], child_active, depth + 1);
      nodes_[static_cast<std::size_t>(id)].branches.push_back({best.parts[q], child});
    }
    return id;
  }

  Choice choose_split(const std::vector<std::size_t>& rows, const std::vector<LevelSet>& active, double g, double h,
                      int node_id) {
    Choice best;
    const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
    const double parent_term = g * g / (h + params_.lambda);
    for (std::size_t f = 0; f < design_.features.size(); ++f) {
      if (active[f].size() < 2) continue;
      const auto& column = design_.features[f].ids;
      std::array<LevelStats, kMaxLevels> stats{};
      for (auto r : rows) {
        auto& s = stats[static_cast<std::size_t>(column[r])];
        s.grad += targets_[r].grad;
        s.hess += targets_[r].hess;
        ++s.count;
      }

      const auto& all = candidates(f, active[f]);
      std::vector<std::size_t> picked;
      const auto cap = static_cast<std::size_t>(params_.max_splits_to_search);
      if (cap != 0 && all.size() > cap) {
        Rng rng(derive_seed(params_.seed, static_cast<std::uint64_t>(node_id), f));
        picked = rng.sample_indices(all.size(), cap);
      } else {
        picked.resize(all.size());
        for (std::size_t i = 0; i < all.size(); ++i) picked[i] = i;
      }

      for (auto idx : picked) {
        const auto& parts = all[idx];
        double score = 0.0;
        bool usable = true;
        for (LevelSet part : parts) {
          double pg = 0.0, ph = 0.0;
          std::size_t pc = 0;
          part.for_each([&](LevelId v) {
            const auto& s = stats[static_cast<std::size_t>(v)];
            pg += s.grad;
            ph += s.hess;
            pc += s.count;
          });
          if (pc < min_leaf || ph + params_.lambda <= 0.0) {
            usable = false;
            break;
          }
          score += pg * pg / (ph + params_.lambda);
        }
        if (!usable) continue;
        const double gain = 0.5 * (score - parent_term);
        // Strict comparison keeps the earliest candidate, then the earliest feature, on ties.
        if (gain > best.gain) {
          best.gain = gain;
          best.feature = static_cast<int>(f);
          best.parts = parts;
        }
      }
    }
    return best;
  }

  const Design& design_;
  std::span<const GradHess> targets_;
  const TreeParams& params_;
  PartitionCache& cache_;
  std::vector<TreeNode> nodes_;
  std::map<std::pair<std::size_t, std::uint64_t>, std::vector<std::vector<LevelSet>>> memo_;
};

}  // namespace

Tree fit_tree(const Design& design, std::span<const GradHess> targets, const TreeParams& params,
              PartitionCache& cache) {
  params.validate();
  if (design.rows == 0) throw Error(ErrorCode::EmptyDataset, "cannot fit a tree on zero rows");
  if (targets.size() != design.rows) {
    throw Error(ErrorCode::MisalignedTargets, std::to_string(targets.size()) + " targets for " +
                                                  std::to_string(design.rows) + " rows");
  }
  for (const auto& f : design.features) {
    if (f.ids.size() != design.rows) {
      throw Error(ErrorCode::MisalignedTargets, "feature '" + f.name + "' column length differs from row count");
    }
  }
  return TreeBuilder(design, targets, params, cache).build();
}

}  // namespace scdt
