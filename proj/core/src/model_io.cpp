#include "crashml/model_io.hpp"

#include <nlohmann/json.hpp>

namespace crashml {

namespace {

using nlohmann::json;

json schema_json(const Schema& schema) {
  json inputs = json::array();
  for (const AttributeSpec& spec : schema.inputs()) {
    inputs.push_back({{"name", spec.name}, {"domain", spec.domain}});
  }
  return json{{"inputs", inputs},
              {"output", {{"name", schema.output().name},
                          {"domain", schema.output().domain}}}};
}

std::shared_ptr<const Schema> schema_from(const json& doc) {
  std::vector<AttributeSpec> inputs;
  for (const auto& a : doc.at("inputs")) {
    AttributeSpec spec;
    spec.name = a.at("name").get<std::string>();
    spec.domain = a.at("domain").get<std::vector<std::string>>();
    inputs.push_back(std::move(spec));
  }
  AttributeSpec output;
  output.name = doc.at("output").at("name").get<std::string>();
  output.domain = doc.at("output").at("domain").get<std::vector<std::string>>();
  return std::make_shared<const Schema>(std::move(inputs), std::move(output));
}

json node_json(const DecisionTree::Node& node, const Schema& schema) {
  json doc{{"n", {node.counts[0], node.counts[1]}}};
  if (!node.is_leaf()) {
    const AttributeSpec& spec =
        schema.inputs()[static_cast<std::size_t>(node.split_attribute)];
    doc["split"] = spec.name;
    json children = json::object();
    for (std::size_t c = 0; c < node.children.size(); ++c) {
      if (node.children[c]) {
        children[spec.domain[c]] = node_json(*node.children[c], schema);
      }
    }
    doc["children"] = std::move(children);
  }
  return doc;
}

std::unique_ptr<DecisionTree::Node> node_from(const json& doc, const Schema& schema) {
  auto node = std::make_unique<DecisionTree::Node>();
  node->counts[0] = doc.at("n").at(0).get<std::int64_t>();
  node->counts[1] = doc.at("n").at(1).get<std::int64_t>();
  if (doc.contains("split")) {
    const std::string attr_name = doc.at("split").get<std::string>();
    const auto attr = schema.input_index(attr_name);
    if (!attr) throw ParseError("tree JSON: unknown split attribute '" + attr_name + "'");
    node->split_attribute = static_cast<int>(*attr);
    const AttributeSpec& spec = schema.inputs()[*attr];
    node->children.resize(spec.domain.size());
    for (const auto& [cat, child] : doc.at("children").items()) {
      const auto idx = spec.category_index(cat);
      if (!idx) {
        throw ParseError("tree JSON: category '" + cat + "' outside domain of '" +
                         attr_name + "'");
      }
      node->children[*idx] = node_from(child, schema);
    }
  }
  return node;
}

json tree_json(const DecisionTree& tree, const Schema& schema) {
  return json{{"laplace", tree.laplace()}, {"root", node_json(tree.root(), schema)}};
}

DecisionTree tree_from(const json& doc, const Schema& schema) {
  return DecisionTree(node_from(doc.at("root"), schema), doc.at("laplace").get<bool>());
}

json kernel_json(const KernelSpec& k) {
  return json{{"kind", k.kind == KernelSpec::Kind::linear ? "linear" : "polynomial"},
              {"degree", k.degree},
              {"coef0", k.coef0}};
}

KernelSpec kernel_from(const json& doc) {
  KernelSpec k;
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "linear") {
    k.kind = KernelSpec::Kind::linear;
  } else if (kind == "polynomial") {
    k.kind = KernelSpec::Kind::polynomial;
  } else {
    throw ParseError("model JSON: unknown kernel kind '" + kind + "'");
  }
  k.degree = doc.at("degree").get<int>();
  k.coef0 = doc.at("coef0").get<double>();
  return k;
}

json svm_json(const SvmModel& m) {
  json support = json::array();
  for (std::size_t i = 0; i < m.support_count(); ++i) {
    json sv{{"alpha", m.sv_alpha[i]}, {"label", static_cast<int>(m.sv_label[i])}};
    const auto row = m.sv_row(i);
    bool zero_one = true;
    for (const double v : row) {
      if (v != 0.0 && v != 1.0) {
        zero_one = false;
        break;
      }
    }
    if (zero_one) {
      json cols = json::array();
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c] == 1.0) cols.push_back(c);
      }
      sv["cols"] = std::move(cols);
    } else {
      sv["vals"] = std::vector<double>(row.begin(), row.end());
    }
    if (m.category_stride > 0) {
      const std::uint16_t* cats = m.sv_categories.data() + i * m.category_stride;
      sv["cats"] = std::vector<int>(cats, cats + m.category_stride);
    }
    support.push_back(std::move(sv));
  }
  json doc{{"type", "svm"},
           {"n_features", m.n_features},
           {"kernel", kernel_json(m.kernel)},
           {"c", m.c},
           {"bias", m.bias},
           {"converged", m.converged},
           {"category_stride", m.category_stride},
           {"support", std::move(support)}};
  if (m.calibration) {
    doc["calibration"] = {{"a", m.calibration->a}, {"b", m.calibration->b}};
  } else {
    doc["calibration"] = nullptr;
  }
  return doc;
}

SvmModel svm_from(const json& doc) {
  SvmModel m;
  m.n_features = doc.at("n_features").get<std::size_t>();
  m.kernel = kernel_from(doc.at("kernel"));
  m.c = doc.at("c").get<double>();
  m.bias = doc.at("bias").get<double>();
  m.converged = doc.at("converged").get<bool>();
  m.category_stride = doc.at("category_stride").get<std::size_t>();
  if (!doc.at("calibration").is_null()) {
    m.calibration = PlattCalibration{doc.at("calibration").at("a").get<double>(),
                                     doc.at("calibration").at("b").get<double>()};
  }
  for (const auto& sv : doc.at("support")) {
    m.sv_alpha.push_back(sv.at("alpha").get<double>());
    m.sv_label.push_back(static_cast<std::int8_t>(sv.at("label").get<int>()));
    std::vector<double> row(m.n_features, 0.0);
    if (sv.contains("cols")) {
      for (const auto& c : sv.at("cols")) row.at(c.get<std::size_t>()) = 1.0;
    } else {
      row = sv.at("vals").get<std::vector<double>>();
      if (row.size() != m.n_features) throw ParseError("model JSON: bad sv row width");
    }
    m.sv_rows.insert(m.sv_rows.end(), row.begin(), row.end());
    if (m.category_stride > 0) {
      const auto cats = sv.at("cats").get<std::vector<int>>();
      if (cats.size() != m.category_stride) {
        throw ParseError("model JSON: bad sv category stride");
      }
      for (const int c : cats) m.sv_categories.push_back(static_cast<std::uint16_t>(c));
    }
  }
  return m;
}

json bag_json(const BaggedModel& bag, const Schema& schema) {
  json members = json::array();
  for (const DecisionTree& tree : bag.members) members.push_back(tree_json(tree, schema));
  return json{{"type", "bag"},
              {"min_leaf", bag.params.min_leaf},
              {"pruning_confidence", bag.params.pruning_confidence},
              {"use_laplace", bag.params.use_laplace},
              {"member_seeds", bag.member_seeds},
              {"members", std::move(members)}};
}

BaggedModel bag_from(const json& doc, const Schema& schema) {
  BaggedModel bag;
  bag.params.min_leaf = doc.at("min_leaf").get<int>();
  bag.params.pruning_confidence = doc.at("pruning_confidence").get<double>();
  bag.params.use_laplace = doc.at("use_laplace").get<bool>();
  bag.member_seeds = doc.at("member_seeds").get<std::vector<std::uint64_t>>();
  for (const auto& t : doc.at("members")) bag.members.push_back(tree_from(t, schema));
  return bag;
}

}  // namespace

std::string model_to_json(const VotingModel& model, const Schema& schema,
                          std::string_view kind) {
  json members = json::array();
  for (const auto& member : model.members) {
    if (const auto* svm = dynamic_cast<const SvmClassifier*>(member.get())) {
      members.push_back(svm_json(svm->model()));
    } else if (const auto* bag = dynamic_cast<const BagClassifier*>(member.get())) {
      members.push_back(bag_json(bag->model(), schema));
    } else {
      throw ArgumentError("model_to_json: member type is not serializable");
    }
  }
  const json doc{{"format", "crashml-model"},
                 {"version", 1},
                 {"kind", std::string(kind)},
                 {"schema", schema_json(schema)},
                 {"members", std::move(members)}};
  return doc.dump(2) + "\n";
}

LoadedModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
  if (doc.value("format", "") != "crashml-model") {
    throw ParseError("model JSON: not a crashml model document");
  }
  LoadedModel loaded;
  loaded.schema = schema_from(doc.at("schema"));
  loaded.kind = doc.value("kind", "vote");
  for (const auto& member : doc.at("members")) {
    const std::string type = member.at("type").get<std::string>();
    if (type == "svm") {
      loaded.model.members.push_back(
          std::make_unique<SvmClassifier>(svm_from(member), loaded.schema));
    } else if (type == "bag") {
      loaded.model.members.push_back(
          std::make_unique<BagClassifier>(bag_from(member, *loaded.schema)));
    } else {
      throw ParseError("model JSON: unknown member type '" + type + "'");
    }
  }
  return loaded;
}

std::string tree_to_json(const DecisionTree& tree, const Schema& schema) {
  return tree_json(tree, schema).dump(2) + "\n";
}

DecisionTree tree_from_json(const std::string& text, const Schema& schema) {
  try {
    return tree_from(json::parse(text), schema);
  } catch (const json::exception& e) {
    throw ParseError(std::string("tree JSON: ") + e.what());
  }
}

std::string svm_to_json(const SvmModel& model) { return svm_json(model).dump(2) + "\n"; }

SvmModel svm_from_json(const std::string& text) {
  try {
    return svm_from(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

}  // namespace crashml
