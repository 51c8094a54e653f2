#include "scdt/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "scdt/error.hpp"
#include "scdt/random.hpp"

namespace scdt {

using json = nlohmann::json;

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Structured: return "structured";
    case FeatureKind::OneHot: return "one_hot";
    case FeatureKind::OrdinalTarget: return "ordinal_target";
    case FeatureKind::OrdinalDeclared: return "ordinal_declared";
    case FeatureKind::Numeric: return "numeric";
  }
  return "?";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "structured") return FeatureKind::Structured;
  if (s == "one_hot") return FeatureKind::OneHot;
  if (s == "ordinal_target") return FeatureKind::OrdinalTarget;
  if (s == "ordinal_declared") return FeatureKind::OrdinalDeclared;
  if (s == "numeric") return FeatureKind::Numeric;
  throw Error(ErrorCode::InvalidSchema, "unknown feature kind '" + s + "'");
}

std::string to_string(Task task) { return task == Task::Binary ? "binary" : "regression"; }

Task task_from_string(const std::string& s) {
  if (s == "binary") return Task::Binary;
  if (s == "regression") return Task::Regression;
  throw Error(ErrorCode::InvalidSchema, "unknown task '" + s + "'");
}

int FeatureSchema::index_of(const std::string& feature) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == feature) return static_cast<int>(i);
  }
  return -1;
}

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

namespace {

std::string resolve_path(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

LevelGraph graph_from(const json& source, const std::string& base_dir) {
  if (source.is_object()) return parse_graph_json(source.dump());
  const auto spec = source.get<std::string>();
  if (spec.rfind("builtin:", 0) == 0) return load_graph(spec);
  return load_graph(resolve_path(spec, base_dir));
}

Terrain terrain_from(const json& source, const std::string& base_dir) {
  if (source.is_object()) return parse_terrain_json(source.dump());
  return load_terrain(resolve_path(source.get<std::string>(), base_dir));
}

}  // namespace

FeatureSchema parse_schema_json(const std::string& text, const std::string& base_dir) {
  FeatureSchema schema;
  try {
    const json doc = json::parse(text);
    schema.target = doc.at("target").get<std::string>();
    schema.task = task_from_string(doc.value("task", std::string("binary")));
    for (const auto& f : doc.at("features")) {
      FeatureSpec spec;
      spec.name = f.at("name").get<std::string>();
      spec.kind = feature_kind_from_string(f.at("kind").get<std::string>());
      spec.max_bins = f.value("max_bins", 32);
      if (spec.name == schema.target) {
        throw Error(ErrorCode::InvalidSchema, "feature '" + spec.name + "' is also the target");
      }
      if (schema.index_of(spec.name) >= 0) {
        throw Error(ErrorCode::InvalidSchema, "feature '" + spec.name + "' declared twice");
      }

      if (spec.kind == FeatureKind::Numeric) {
        if (spec.max_bins < 2) throw Error(ErrorCode::InvalidSchema, "max_bins must be at least 2");
      } else if (f.contains("terrain")) {
        spec.terrain = terrain_from(f.at("terrain"), base_dir);
        spec.levels = spec.terrain->level_names();
      } else if (f.contains("graph")) {
        auto g = graph_from(f.at("graph"), base_dir);
        spec.levels = g.levels();
        if (spec.kind == FeatureKind::Structured) spec.terrain = Terrain::graph_induced(std::move(g));
      } else if (f.contains("levels")) {
        if (spec.kind == FeatureKind::Structured) {
          throw Error(ErrorCode::InvalidSchema, "structured feature '" + spec.name + "' needs a graph or terrain");
        }
        spec.levels = f.at("levels").get<std::vector<std::string>>();
        std::vector<std::string> sorted = spec.levels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
          throw Error(ErrorCode::DuplicateLevel, "feature '" + spec.name + "' repeats a level");
        }
        if (spec.levels.size() > static_cast<std::size_t>(kMaxLevels)) {
          throw Error(ErrorCode::TooManyLevels, "feature '" + spec.name + "' has more than 64 levels");
        }
      } else {
        throw Error(ErrorCode::InvalidSchema, "categorical feature '" + spec.name + "' declares no levels");
      }
      schema.features.push_back(std::move(spec));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidSchema, std::string("malformed schema JSON: ") + ex.what());
  }
  if (schema.features.empty()) throw Error(ErrorCode::InvalidSchema, "schema declares no features");
  return schema;
}

FeatureSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open schema '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_schema_json(buf.str(), parent.empty() ? "." : parent.string());
}

std::string schema_to_json(const FeatureSchema& schema) {
  json features = json::array();
  for (const auto& f : schema.features) {
    json entry{{"name", f.name}, {"kind", to_string(f.kind)}};
    if (f.kind == FeatureKind::Numeric) {
      entry["max_bins"] = f.max_bins;
    } else if (f.terrain && f.terrain->is_graph_induced()) {
      entry["graph"] = json::parse(graph_to_json(f.terrain->graph()));
    } else if (f.terrain) {
      entry["terrain"] = json::parse(terrain_to_json(*f.terrain));
    } else {
      entry["levels"] = f.levels;
    }
    features.push_back(std::move(entry));
  }
  json doc{{"target", schema.target}, {"task", to_string(schema.task)}, {"features", std::move(features)}};
  return doc.dump();
}

Dataset Dataset::subset(const std::vector<std::size_t>& row_ids) const {
  Dataset out;
  out.schema = schema;
  out.rows = row_ids.size();
  out.categorical.resize(categorical.size());
  out.numeric.resize(numeric.size());
  for (std::size_t f = 0; f < categorical.size(); ++f) {
    if (categorical[f].empty() && rows > 0) continue;
    out.categorical[f].reserve(row_ids.size());
    for (auto r : row_ids) out.categorical[f].push_back(categorical[f][r]);
  }
  for (std::size_t f = 0; f < numeric.size(); ++f) {
    if (numeric[f].empty() && rows > 0) continue;
    out.numeric[f].reserve(row_ids.size());
    for (auto r : row_ids) out.numeric[f].push_back(numeric[f][r]);
  }
  if (has_target()) {
    out.target.reserve(row_ids.size());
    for (auto r : row_ids) out.target.push_back(target[r]);
  }
  return out;
}

Dataset Dataset::with_schema(std::shared_ptr<const FeatureSchema> other) const {
  if (other->features.size() != schema->features.size()) {
    throw Error(ErrorCode::InvalidSchema, "schemas differ in feature count");
  }
  for (std::size_t f = 0; f < other->features.size(); ++f) {
    const auto& a = schema->features[f];
    const auto& b = other->features[f];
    if (a.name != b.name || a.is_categorical() != b.is_categorical() || a.levels != b.levels) {
      throw Error(ErrorCode::InvalidSchema, "feature '" + b.name + "' is not column-compatible");
    }
  }
  Dataset out = *this;
  out.schema = std::move(other);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Dataset read_dataset(std::istream& in, std::shared_ptr<const FeatureSchema> schema, TargetPolicy policy) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MissingColumn, "CSV has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  auto column_of = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };

  const std::size_t nf = schema->features.size();
  std::vector<int> cols(nf);
  std::vector<std::unordered_map<std::string, LevelId>> lookup(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& spec = schema->features[f];
    cols[f] = column_of(spec.name);
    if (cols[f] < 0) throw Error(ErrorCode::MissingColumn, "CSV lacks column '" + spec.name + "'");
    for (std::size_t i = 0; i < spec.levels.size(); ++i) lookup[f].emplace(spec.levels[i], static_cast<LevelId>(i));
  }
  const int target_col = column_of(schema->target);
  if (target_col < 0 && policy == TargetPolicy::Required) {
    throw Error(ErrorCode::MissingColumn, "CSV lacks target column '" + schema->target + "'");
  }

  Dataset d;
  d.schema = schema;
  d.categorical.resize(nf);
  d.numeric.resize(nf);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MissingValue, "line " + std::to_string(line_no) + " has " +
                                               std::to_string(fields.size()) + " fields, header has " +
                                               std::to_string(header.size()));
    }
    for (std::size_t f = 0; f < nf; ++f) {
      const auto& spec = schema->features[f];
      const auto& cell = fields[static_cast<std::size_t>(cols[f])];
      if (cell.empty()) {
        throw Error(ErrorCode::MissingValue, "line " + std::to_string(line_no) + ": empty '" + spec.name + "'");
      }
      if (spec.is_categorical()) {
        auto it = lookup[f].find(cell);
        if (it == lookup[f].end()) {
          throw Error(ErrorCode::UnknownLevel, "line " + std::to_string(line_no) + ": level '" + cell +
                                                   "' is not declared for '" + spec.name + "'");
        }
        d.categorical[f].push_back(it->second);
      } else {
        auto v = parse_double(cell);
        if (!v) {
          throw Error(ErrorCode::InvalidSchema, "line " + std::to_string(line_no) + ": '" + cell +
                                                    "' is not a number for '" + spec.name + "'");
        }
        d.numeric[f].push_back(*v);
      }
    }
    if (target_col >= 0) {
      const auto& cell = fields[static_cast<std::size_t>(target_col)];
      if (cell.empty()) throw Error(ErrorCode::MissingValue, "line " + std::to_string(line_no) + ": empty target");
      auto v = parse_double(cell);
      if (!v) throw Error(ErrorCode::NonBinaryTarget, "line " + std::to_string(line_no) + ": target '" + cell + "'");
      if (schema->task == Task::Binary && *v != 0.0 && *v != 1.0) {
        throw Error(ErrorCode::NonBinaryTarget, "line " + std::to_string(line_no) + ": target '" + cell +
                                                    "' is not 0 or 1");
      }
      d.target.push_back(*v);
    }
    ++d.rows;
  }
  return d;
}

Dataset load_dataset(const std::string& csv_path, std::shared_ptr<const FeatureSchema> schema, TargetPolicy policy) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::Io, "cannot open data file '" + csv_path + "'");
  return read_dataset(in, std::move(schema), policy);
}

void write_dataset_csv(const Dataset& d, std::ostream& out) {
  const auto& features = d.schema->features;
  for (std::size_t f = 0; f < features.size(); ++f) out << (f ? "," : "") << csv_escape(features[f].name);
  if (d.has_target()) out << ',' << csv_escape(d.schema->target);
  out << '\n';
  for (std::size_t r = 0; r < d.rows; ++r) {
    for (std::size_t f = 0; f < features.size(); ++f) {
      if (f) out << ',';
      if (features[f].is_categorical()) {
        out << csv_escape(features[f].levels[static_cast<std::size_t>(d.categorical[f][r])]);
      } else {
        out << format_number(d.numeric[f][r]);
      }
    }
    if (d.has_target()) out << ',' << format_number(d.target[r]);
    out << '\n';
  }
}

LevelId NumericBinning::bin_of(double x) const {
  return static_cast<LevelId>(std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

LevelGraph NumericBinning::chain(const std::string& name) const {
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i + 1 < names.size(); ++i) edges.emplace_back(names[i], names[i + 1]);
  return build_graph(name, names, edges);
}

NumericBinning binning_from_cuts(std::vector<double> cuts) {
  NumericBinning b;
  b.cuts = std::move(cuts);
  if (static_cast<int>(b.cuts.size()) + 1 > kMaxLevels) {
    throw Error(ErrorCode::TooManyLevels, "numeric binning exceeds 64 bins");
  }
  for (std::size_t i = 0; i <= b.cuts.size(); ++i) {
    const std::string lo = i == 0 ? "-inf" : format_number(b.cuts[i - 1]);
    const std::string hi = i == b.cuts.size() ? "inf)" : format_number(b.cuts[i]) + "]";
    b.names.push_back("(" + lo + "," + hi);
  }
  return b;
}

NumericBinning bin_numeric(const std::vector<double>& values, int max_bins) {
  if (max_bins < 2) throw Error(ErrorCode::InvalidParams, "max_bins must be at least 2");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw Error(ErrorCode::ConstantColumn, "numeric column has a single distinct value");

  std::vector<double> cuts;
  if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
    cuts.assign(distinct.begin(), distinct.end() - 1);
  } else {
    const std::size_t n = sorted.size();
    for (int b = 1; b < max_bins; ++b) {
      const std::size_t k = (static_cast<std::size_t>(b) * n + static_cast<std::size_t>(max_bins) - 1) /
                            static_cast<std::size_t>(max_bins);
      const double cut = sorted[k - 1];
      if (cut < distinct.back() && (cuts.empty() || cut > cuts.back())) cuts.push_back(cut);
    }
  }
  NumericBinning b = binning_from_cuts(std::move(cuts));
  b.ids.reserve(values.size());
  for (double v : values) b.ids.push_back(b.bin_of(v));
  return b;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::EmptySplit, "test fraction must lie strictly between 0 and 1");
  }
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(d.rows)));
  if (n_test == 0 || n_test >= d.rows) {
    throw Error(ErrorCode::EmptySplit, "split of " + std::to_string(d.rows) + " rows leaves one side empty");
  }
  std::vector<std::size_t> order(d.rows);
  for (std::size_t i = 0; i < d.rows; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  return {d.subset(train), d.subset(test)};
}

}  // namespace scdt
