#include "scdt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scdt/error.hpp"

namespace scdt {

using json = nlohmann::json;

namespace {

LevelGraph indicator_graph(const std::string& name) { return build_graph(name, {"0", "1"}, {{"0", "1"}}); }

LevelGraph chain_over(const std::string& name, const std::vector<std::string>& levels) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) edges.emplace_back(levels[i], levels[i + 1]);
  return build_graph(name, levels, edges);
}

}  // namespace

std::vector<EncodedFeature> encode_one_hot(const std::string& feature, const std::vector<std::string>& levels,
                                           std::span<const LevelId> ids) {
  std::vector<EncodedFeature> out;
  if (levels.size() < 2) {
    warn("ConstantColumn: one-hot feature '" + feature + "' has a single level and is dropped");
    return out;
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::string name = feature + "=" + levels[l];
    EncodedFeature f{name, Terrain::graph_induced(indicator_graph(name)), {}};
    f.ids.reserve(ids.size());
    for (LevelId v : ids) f.ids.push_back(v == static_cast<LevelId>(l) ? 1 : 0);
    out.push_back(std::move(f));
  }
  return out;
}

OrdinalMap fit_ordinal(int levels, std::span<const LevelId> ids, std::span<const double> target) {
  if (ids.size() != target.size()) throw Error(ErrorCode::LengthMismatch, "ordinal fit: column/target lengths differ");
  if (ids.empty()) throw Error(ErrorCode::EmptyDataset, "ordinal fit on zero rows");
  OrdinalMap map;
  const auto m = static_cast<std::size_t>(levels);
  std::vector<double> sums(m, 0.0);
  map.counts.assign(m, 0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    sums[static_cast<std::size_t>(ids[i])] += target[i];
    ++map.counts[static_cast<std::size_t>(ids[i])];
  }
  map.global_mean = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(target.size());
  map.means.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t l = 0; l < m; ++l) {
    if (map.counts[l] > 0) {
      map.means[l] = sums[l] / static_cast<double>(map.counts[l]);
      map.by_rank.push_back(static_cast<LevelId>(l));
    }
  }
  std::stable_sort(map.by_rank.begin(), map.by_rank.end(), [&](LevelId a, LevelId b) {
    return map.means[static_cast<std::size_t>(a)] < map.means[static_cast<std::size_t>(b)];
  });
  map.rank.assign(m, -1);
  for (std::size_t r = 0; r < map.by_rank.size(); ++r) map.rank[static_cast<std::size_t>(map.by_rank[r])] = static_cast<int>(r);

  LevelId nearest = map.by_rank.front();
  for (LevelId l : map.by_rank) {
    const double d = std::abs(map.means[static_cast<std::size_t>(l)] - map.global_mean);
    const double best = std::abs(map.means[static_cast<std::size_t>(nearest)] - map.global_mean);
    if (d < best || (d == best && l < nearest)) nearest = l;
  }
  for (std::size_t l = 0; l < m; ++l) {
    if (map.rank[l] < 0) map.rank[l] = map.rank[static_cast<std::size_t>(nearest)];
  }
  return map;
}

EncodedFeature encode_ordinal(const std::string& feature, const std::vector<std::string>& levels,
                              const OrdinalMap& map, std::span<const LevelId> ids) {
  std::vector<std::string> names;
  for (LevelId l : map.by_rank) names.push_back(levels[static_cast<std::size_t>(l)]);
  EncodedFeature f{feature, Terrain::graph_induced(chain_over(feature, names)), {}};
  f.ids.reserve(ids.size());
  bool unseen = false;
  for (LevelId v : ids) {
    unseen = unseen || map.counts[static_cast<std::size_t>(v)] == 0;
    f.ids.push_back(map.rank[static_cast<std::size_t>(v)]);
  }
  if (unseen) {
    warn("UnseenLevelAtApply: feature '" + feature +
         "' has levels absent from training; they take the rank nearest the global mean");
  }
  return f;
}

SiloedTable SiloedTable::fit(const std::vector<std::span<const LevelId>>& columns, std::span<const double> target) {
  if (columns.empty()) throw Error(ErrorCode::InvalidParams, "siloed model needs at least one categorical feature");
  if (target.empty()) throw Error(ErrorCode::EmptyDataset, "siloed model fit on zero rows");
  SiloedTable table;
  std::vector<LevelId> key(columns.size());
  for (std::size_t r = 0; r < target.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) key[c] = columns[c][r];
    auto& cell = table.cells_[key];
    ++cell.count;
    cell.mean += target[r];
  }
  for (auto& [k, cell] : table.cells_) cell.mean /= static_cast<double>(cell.count);
  table.global_mean_ = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(target.size());
  return table;
}

double SiloedTable::predict(std::span<const LevelId> combination) const {
  auto it = cells_.find(std::vector<LevelId>(combination.begin(), combination.end()));
  return it == cells_.end() ? global_mean_ : it->second.mean;
}

std::vector<double> SiloedTable::predict(const std::vector<std::span<const LevelId>>& columns) const {
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  std::vector<double> out(n);
  std::vector<LevelId> key(columns.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) key[c] = columns[c][r];
    out[r] = predict(key);
  }
  return out;
}

SiloedTable fit_siloed(const Dataset& train) {
  std::vector<std::span<const LevelId>> columns;
  for (std::size_t f = 0; f < train.schema->features.size(); ++f) {
    if (train.schema->features[f].is_categorical()) columns.emplace_back(train.categorical[f]);
  }
  return SiloedTable::fit(columns, train.target);
}

Preprocessor Preprocessor::fit(const Dataset& train) {
  if (train.rows == 0) throw Error(ErrorCode::EmptyDataset, "cannot fit preprocessing on zero rows");
  Preprocessor p;
  p.schema_ = train.schema;
  const auto& features = train.schema->features;
  for (std::size_t f = 0; f < features.size(); ++f) {
    Step step;
    step.source = static_cast<int>(f);
    step.kind = features[f].kind;
    switch (step.kind) {
      case FeatureKind::Structured:
      case FeatureKind::OrdinalDeclared:
        step.dropped = features[f].levels.size() < 2;
        break;
      case FeatureKind::OneHot:
        step.dropped = features[f].levels.size() < 2;
        break;
      case FeatureKind::OrdinalTarget:
        if (!train.has_target()) throw Error(ErrorCode::MisalignedTargets, "ordinal encoding needs training targets");
        step.ordinal = fit_ordinal(static_cast<int>(features[f].levels.size()), train.categorical[f], train.target);
        step.dropped = step.ordinal.seen() < 2;
        break;
      case FeatureKind::Numeric:
        try {
          step.binning = bin_numeric(train.numeric[f], features[f].max_bins);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ConstantColumn) throw;
          step.dropped = true;
        }
        break;
    }
    if (step.dropped) warn("ConstantColumn: feature '" + features[f].name + "' has a single value and is dropped");
    p.steps_.push_back(std::move(step));
  }
  p.build_template();
  return p;
}

void Preprocessor::build_template() {
  template_.clear();
  for (const auto& step : steps_) {
    if (step.dropped) continue;
    const auto& spec = schema_->features[static_cast<std::size_t>(step.source)];
    switch (step.kind) {
      case FeatureKind::Structured:
        template_.push_back({spec.name, *spec.terrain, {}});
        break;
      case FeatureKind::OrdinalDeclared:
        template_.push_back({spec.name, Terrain::graph_induced(chain_over(spec.name, spec.levels)), {}});
        break;
      case FeatureKind::OneHot:
        for (const auto& level : spec.levels) {
          const std::string name = spec.name + "=" + level;
          template_.push_back({name, Terrain::graph_induced(indicator_graph(name)), {}});
        }
        break;
      case FeatureKind::OrdinalTarget: {
        std::vector<std::string> names;
        for (LevelId l : step.ordinal.by_rank) names.push_back(spec.levels[static_cast<std::size_t>(l)]);
        template_.push_back({spec.name, Terrain::graph_induced(chain_over(spec.name, names)), {}});
        break;
      }
      case FeatureKind::Numeric:
        template_.push_back({spec.name, Terrain::graph_induced(step.binning.chain(spec.name)), {}});
        break;
    }
  }
}

Design Preprocessor::transform(const Dataset& d) const {
  if (d.schema->features.size() != schema_->features.size()) {
    throw Error(ErrorCode::InvalidSchema, "dataset does not match the fitted schema");
  }
  Design out;
  out.rows = d.rows;
  out.target = d.target;
  out.features = template_;
  std::size_t slot = 0;
  for (const auto& step : steps_) {
    if (step.dropped) continue;
    const auto f = static_cast<std::size_t>(step.source);
    switch (step.kind) {
      case FeatureKind::Structured:
      case FeatureKind::OrdinalDeclared:
        out.features[slot++].ids = d.categorical[f];
        break;
      case FeatureKind::OneHot: {
        const auto m = schema_->features[f].levels.size();
        for (std::size_t l = 0; l < m; ++l) {
          auto& ids = out.features[slot++].ids;
          ids.reserve(d.rows);
          for (LevelId v : d.categorical[f]) ids.push_back(v == static_cast<LevelId>(l) ? 1 : 0);
        }
        break;
      }
      case FeatureKind::OrdinalTarget: {
        auto encoded = encode_ordinal(schema_->features[f].name, schema_->features[f].levels, step.ordinal,
                                      d.categorical[f]);
        out.features[slot++].ids = std::move(encoded.ids);
        break;
      }
      case FeatureKind::Numeric: {
        auto& ids = out.features[slot++].ids;
        ids.reserve(d.rows);
        for (double v : d.numeric[f]) ids.push_back(step.binning.bin_of(v));
        break;
      }
    }
  }
  return out;
}

json Preprocessor::to_json() const {
  json steps = json::array();
  for (const auto& step : steps_) {
    const auto& spec = schema_->features[static_cast<std::size_t>(step.source)];
    json s{{"feature", spec.name}, {"kind", to_string(step.kind)}, {"dropped", step.dropped}};
    if (step.kind == FeatureKind::OrdinalTarget && !step.dropped) {
      json means = json::array();
      for (double m : step.ordinal.means) means.push_back(std::isnan(m) ? json(nullptr) : json(m));
      s["means"] = std::move(means);
      s["counts"] = step.ordinal.counts;
      s["rank"] = step.ordinal.rank;
      s["global_mean"] = step.ordinal.global_mean;
      json order = json::array();
      for (LevelId l : step.ordinal.by_rank) order.push_back(spec.levels[static_cast<std::size_t>(l)]);
      s["order"] = std::move(order);
    }
    if (step.kind == FeatureKind::Numeric && !step.dropped) s["cuts"] = step.binning.cuts;
    steps.push_back(std::move(s));
  }
  return json{{"steps", std::move(steps)}};
}

Preprocessor Preprocessor::from_json(const json& doc, std::shared_ptr<const FeatureSchema> schema) {
  Preprocessor p;
  p.schema_ = std::move(schema);
  try {
    for (const auto& s : doc.at("steps")) {
      Step step;
      step.source = p.schema_->index_of(s.at("feature").get<std::string>());
      if (step.source < 0) throw Error(ErrorCode::InvalidModel, "preprocessing names an unknown feature");
      step.kind = feature_kind_from_string(s.at("kind").get<std::string>());
      step.dropped = s.at("dropped").get<bool>();
      const auto& spec = p.schema_->features[static_cast<std::size_t>(step.source)];
      if (step.kind == FeatureKind::OrdinalTarget && !step.dropped) {
        for (const auto& m : s.at("means")) {
          step.ordinal.means.push_back(m.is_null() ? std::numeric_limits<double>::quiet_NaN() : m.get<double>());
        }
        step.ordinal.counts = s.at("counts").get<std::vector<std::size_t>>();
        step.ordinal.rank = s.at("rank").get<std::vector<int>>();
        step.ordinal.global_mean = s.at("global_mean").get<double>();
        for (const auto& name : s.at("order")) {
          auto it = std::find(spec.levels.begin(), spec.levels.end(), name.get<std::string>());
          if (it == spec.levels.end()) throw Error(ErrorCode::InvalidModel, "ordinal order names an unknown level");
          step.ordinal.by_rank.push_back(static_cast<LevelId>(it - spec.levels.begin()));
        }
        if (step.ordinal.rank.size() != spec.levels.size() || step.ordinal.counts.size() != spec.levels.size()) {
          throw Error(ErrorCode::InvalidModel, "ordinal map size does not match the level list");
        }
      }
      if (step.kind == FeatureKind::Numeric && !step.dropped) {
        step.binning = binning_from_cuts(s.at("cuts").get<std::vector<double>>());
      }
      p.steps_.push_back(std::move(step));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidModel, std::string("malformed preprocessing block: ") + ex.what());
  }
  p.build_template();
  return p;
}

}  // namespace scdt
