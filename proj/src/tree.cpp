#include "dtreason/tree.hpp"

#include <algorithm>
#include <set>

#include "dtreason/error.hpp"

namespace dtr {

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<std::string> DecisionTree::classes() const {
  std::set<std::string> labels;
  for (const auto& n : nodes) {
    if (const auto* leaf = std::get_if<Leaf>(&n.content)) labels.insert(leaf->label);
  }
  return {labels.begin(), labels.end()};
}

namespace {

class TreeReader {
 public:
  explicit TreeReader(const std::vector<FeatureMeta>& features) : features_(features) {}

  int read(const nlohmann::json& node, const std::string& path, std::vector<TreeNode>& out) {
    if (!node.is_object()) fail(path, "expected an object");
    auto index = static_cast<int>(out.size());
    out.emplace_back();
    if (node.contains("leaf")) {
      const auto& leaf = node["leaf"];
      if (!leaf.is_object() || !leaf.contains("class")) fail(path, "leaf needs a \"class\"");
      Leaf l;
      l.label = leaf["class"].is_string() ? leaf["class"].get<std::string>() : leaf["class"].dump();
      l.confidence = leaf.contains("confidence") ? number(leaf["confidence"], path) : Rat(1);
      if (l.confidence.sign() < 0 || l.confidence > Rat(1)) {
        fail(path, "confidence must lie in [0, 1]");
      }
      out[static_cast<std::size_t>(index)].content = std::move(l);
      return index;
    }
    if (node.contains("split")) {
      out[static_cast<std::size_t>(index)].content = linear_split(node["split"], path);
    } else if (node.contains("split_eq")) {
      out[static_cast<std::size_t>(index)].content = equality_split(node["split_eq"], path);
    } else {
      fail(path, "expected \"leaf\", \"split\" or \"split_eq\"");
    }
    if (!node.contains("left") || !node.contains("right")) {
      fail(path, "split nodes need \"left\" and \"right\"");
    }
    int left = read(node["left"], path + ".left", out);
    int right = read(node["right"], path + ".right", out);
    out[static_cast<std::size_t>(index)].left = left;
    out[static_cast<std::size_t>(index)].right = right;
    return index;
  }

 private:
  [[noreturn]] static void fail(const std::string& path, const std::string& why) {
    throw Error(ErrorKind::Parse, path + ": " + why);
  }

  static Rat number(const nlohmann::json& v, const std::string& path) {
    try {
      return rat_from_json(v);
    } catch (const Error& e) {
      fail(path, e.detail());
    }
  }

  std::size_t feature(const nlohmann::json& name, const std::string& path) const {
    if (!name.is_string()) fail(path, "feature must be a string");
    auto n = name.get<std::string>();
    for (std::size_t i = 0; i < features_.size(); ++i) {
      if (features_[i].name == n) return i;
    }
    throw Error(ErrorKind::UnknownName, path + ": unknown feature '" + n + "'");
  }

  LinearSplit linear_split(const nlohmann::json& s, const std::string& path) const {
    if (!s.is_object() || !s.contains("terms") || !s.contains("threshold")) {
      fail(path, "split needs \"terms\" and \"threshold\"");
    }
    if (s.value("op", std::string("le")) != "le") fail(path, "only op \"le\" is supported");
    LinearSplit split;
    for (const auto& t : s["terms"]) {
      if (!t.is_object() || !t.contains("feature")) fail(path, "split terms need a \"feature\"");
      std::size_t f = feature(t["feature"], path);
      if (features_[f].kind == FeatureKind::Nominal) {
        throw Error(ErrorKind::Type, path + ": nominal feature '" + features_[f].name +
                                         "' in a linear split; use split_eq");
      }
      split.terms.emplace_back(f, t.contains("coef") ? number(t["coef"], path) : Rat(1));
    }
    if (split.terms.empty()) fail(path, "split has no terms");
    split.threshold = number(s["threshold"], path);
    return split;
  }

  EqualitySplit equality_split(const nlohmann::json& s, const std::string& path) const {
    if (!s.is_object() || !s.contains("feature") || !s.contains("value")) {
      fail(path, "split_eq needs \"feature\" and \"value\"");
    }
    std::size_t f = feature(s["feature"], path);
    const auto& meta = features_[f];
    if (meta.kind != FeatureKind::Nominal) {
      throw Error(ErrorKind::Type, path + ": split_eq on non-nominal feature '" + meta.name + "'");
    }
    auto value = s["value"].is_string() ? s["value"].get<std::string>() : s["value"].dump();
    auto idx = meta.value_index(value);
    if (!idx) {
      throw Error(ErrorKind::Domain,
                  path + ": value '" + value + "' not in the domain of '" + meta.name + "'");
    }
    return {f, *idx};
  }

  const std::vector<FeatureMeta>& features_;
};

nlohmann::json node_to_json(const DecisionTree& t, int index) {
  const auto& n = t.nodes[static_cast<std::size_t>(index)];
  if (const auto* leaf = std::get_if<Leaf>(&n.content)) {
    return {{"leaf", {{"class", leaf->label}, {"confidence", leaf->confidence.str()}}}};
  }
  nlohmann::json out;
  if (const auto* s = std::get_if<LinearSplit>(&n.content)) {
    auto terms = nlohmann::json::array();
    for (const auto& [f, c] : s->terms) {
      terms.push_back({{"feature", t.features[f].name}, {"coef", c.str()}});
    }
    out["split"] = {{"terms", terms}, {"op", "le"}, {"threshold", s->threshold.str()}};
  } else {
    const auto& e = std::get<EqualitySplit>(n.content);
    out["split_eq"] = {{"feature", t.features[e.feature].name},
                       {"value", t.features[e.feature].values[e.value]}};
  }
  out["left"] = node_to_json(t, n.left);
  out["right"] = node_to_json(t, n.right);
  return out;
}

}  // namespace

DecisionTree parse_tree(const nlohmann::json& doc, const std::vector<FeatureMeta>& features) {
  if (!doc.is_object() || !doc.contains("model_id") || !doc.contains("node")) {
    throw Error(ErrorKind::Parse, "tree document needs \"model_id\" and \"node\"");
  }
  DecisionTree tree;
  tree.model_id = doc["model_id"].get<std::string>();
  tree.features = features;
  TreeReader(features).read(doc["node"], "node", tree.nodes);
  return tree;
}

nlohmann::json tree_to_json(const DecisionTree& tree) {
  return {{"model_id", tree.model_id}, {"node", node_to_json(tree, 0)}};
}

namespace {

void walk(const DecisionTree& tree, const VarLayout& layout, std::size_t instance, int index,
          Conjunction& path, std::vector<PathFact>& out) {
  const auto& n = tree.nodes[static_cast<std::size_t>(index)];
  if (const auto* leaf = std::get_if<Leaf>(&n.content)) {
    out.push_back({tree.model_id, path, leaf->label, leaf->confidence});
    return;
  }
  auto layout_feature = [&](std::size_t f) {
    auto idx = layout.feature_index(tree.features[f].name);
    if (!idx) {
      throw Error(ErrorKind::UnknownName, "feature '" + tree.features[f].name + "' not in layout");
    }
    return *idx;
  };
  LinearConstraint left = LinearConstraint::true_();
  LinearConstraint right = LinearConstraint::true_();
  if (const auto* s = std::get_if<LinearSplit>(&n.content)) {
    LinExpr e;
    for (const auto& [f, c] : s->terms) e.add_term(layout.var(instance, layout_feature(f)), c);
    left = LinearConstraint::normalize(e, RawRel::LE, LinExpr(s->threshold));
    right = negate(left);
  } else {
    const auto& eq = std::get<EqualitySplit>(n.content);
    LinExpr x = LinExpr::var(layout.var(instance, layout_feature(eq.feature), eq.value));
    left = LinearConstraint::normalize(x, RawRel::EQ, LinExpr(Rat(1)));
    right = LinearConstraint::normalize(x, RawRel::EQ, LinExpr(Rat(0)));
  }
  path.push_back(left);
  walk(tree, layout, instance, n.left, path, out);
  path.constraints.back() = right;
  walk(tree, layout, instance, n.right, path, out);
  path.constraints.pop_back();
}

}  // namespace

std::vector<PathFact> enumerate_paths(const DecisionTree& tree, const VarLayout& layout,
                                      std::size_t instance) {
  std::vector<PathFact> out;
  Conjunction path;
  if (!tree.nodes.empty()) walk(tree, layout, instance, 0, path, out);
  return out;
}

Prediction predict(const DecisionTree& tree, const NamedPoint& point) {
  auto lookup = [&](std::size_t f) -> const FeatureValue& {
    auto it = point.find(tree.features[f].name);
    if (it == point.end()) {
      throw Error(ErrorKind::Validation, "unbound feature '" + tree.features[f].name + "'");
    }
    return it->second;
  };
  int index = 0;
  for (;;) {
    const auto& n = tree.nodes[static_cast<std::size_t>(index)];
    if (const auto* leaf = std::get_if<Leaf>(&n.content)) return {leaf->label, leaf->confidence};
    bool go_left = false;
    if (const auto* s = std::get_if<LinearSplit>(&n.content)) {
      Rat sum;
      for (const auto& [f, c] : s->terms) {
        const auto* v = std::get_if<Rat>(&lookup(f));
        if (!v) throw Error(ErrorKind::Type, "feature '" + tree.features[f].name + "' is numeric");
        sum += c * *v;
      }
      go_left = sum <= s->threshold;
    } else {
      const auto& eq = std::get<EqualitySplit>(n.content);
      const auto* v = std::get_if<std::string>(&lookup(eq.feature));
      if (!v) throw Error(ErrorKind::Type, "feature '" + tree.features[eq.feature].name + "' is nominal");
      go_left = *v == tree.features[eq.feature].values[eq.value];
    }
    index = go_left ? n.left : n.right;
  }
}

}  // namespace dtr
