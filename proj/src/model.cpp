#include "scdt/model.hpp"

#include <fstream>
#include <sstream>

#include "scdt/error.hpp"

namespace scdt {

using json = nlohmann::json;

std::vector<double> Model::predict(const Dataset& d) const { return ensemble.predict(preprocessing.transform(d)); }

namespace {

json tree_to_json(const Tree& tree, const std::vector<EncodedFeature>& design) {
  json nodes = json::array();
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const auto& node = tree.nodes()[i];
    json n{{"id", i}};
    if (node.is_leaf()) {
      n["weight"] = node.weight;
    } else {
      const auto& feature = design[static_cast<std::size_t>(node.feature)];
      n["feature"] = feature.name;
      json branches = json::array();
      for (const auto& b : node.branches) {
        branches.push_back({{"levels", feature.terrain.names_of(b.levels)}, {"child", b.child}});
      }
      n["branches"] = std::move(branches);
    }
    nodes.push_back(std::move(n));
  }
  return json{{"nodes", std::move(nodes)}};
}

Tree tree_from_json(const json& doc, const std::vector<EncodedFeature>& design) {
  const auto& nodes_json = doc.at("nodes");
  std::vector<TreeNode> nodes(nodes_json.size());
  for (const auto& n : nodes_json) {
    const auto id = n.at("id").get<std::size_t>();
    if (id >= nodes.size()) throw Error(ErrorCode::InvalidModel, "node id out of range");
    TreeNode& node = nodes[id];
    if (n.contains("weight")) node.weight = n.at("weight").get<double>();
    if (!n.contains("feature")) continue;
    const auto name = n.at("feature").get<std::string>();
    auto it = std::find_if(design.begin(), design.end(), [&](const EncodedFeature& f) { return f.name == name; });
    if (it == design.end()) throw Error(ErrorCode::InvalidModel, "tree references unknown feature '" + name + "'");
    node.feature = static_cast<int>(it - design.begin());
    for (const auto& b : n.at("branches")) {
      const int child = b.at("child").get<int>();
      if (child <= static_cast<int>(id) || child >= static_cast<int>(nodes.size())) {
        throw Error(ErrorCode::InvalidModel, "branch child out of range");
      }
      node.branches.push_back({it->terrain.ids_of(b.at("levels").get<std::vector<std::string>>()), child});
    }
  }
  return Tree(std::move(nodes));
}

}  // namespace

std::string model_to_json(const Model& model) {
  const auto& design = model.preprocessing.design_template();
  json trees = json::array();
  for (const auto& t : model.ensemble.trees) trees.push_back(tree_to_json(t, design));
  json doc{{"task", to_string(model.ensemble.task)},
           {"base_score", model.ensemble.base_score},
           {"learning_rate", model.ensemble.learning_rate},
           {"schema", json::parse(schema_to_json(*model.schema))},
           {"preprocessing", model.preprocessing.to_json()},
           {"trees", std::move(trees)}};
  return doc.dump();
}

Model model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    Model model;
    model.schema = std::make_shared<const FeatureSchema>(parse_schema_json(doc.at("schema").dump()));
    model.preprocessing = Preprocessor::from_json(doc.at("preprocessing"), model.schema);
    model.ensemble.task = task_from_string(doc.at("task").get<std::string>());
    model.ensemble.base_score = doc.at("base_score").get<double>();
    model.ensemble.learning_rate = doc.at("learning_rate").get<double>();
    for (const auto& t : doc.at("trees")) {
      model.ensemble.trees.push_back(tree_from_json(t, model.preprocessing.design_template()));
    }
    return model;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidModel, std::string("malformed model JSON: ") + ex.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write model '" + path + "'");
  out << model_to_json(model) << '\n';
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open model '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace scdt
