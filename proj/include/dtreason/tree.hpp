#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dtreason/features.hpp"

namespace dtr {

/// Oblique or axis-parallel split: left child iff sum(coef * feature) <= threshold.
struct LinearSplit {
  std::vector<std::pair<std::size_t, Rat>> terms;  // (feature index, coefficient)
  Rat threshold;
};

/// Nominal split: left child iff feature == value.
struct EqualitySplit {
  std::size_t feature;
  std::size_t value;
};

struct Leaf {
  std::string label;
  Rat confidence;
};

struct TreeNode {
  std::variant<LinearSplit, EqualitySplit, Leaf> content;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return std::holds_alternative<Leaf>(content); }
};

/// Binary decision tree over a fixed feature list. Node 0 is the root.
struct DecisionTree {
  std::string model_id;
  std::vector<FeatureMeta> features;
  std::vector<TreeNode> nodes;

  std::size_t leaf_count() const;
  /// Sorted, distinct leaf labels.
  std::vector<std::string> classes() const;
};

/// Reads the tree interchange document. Errors name the offending node by
/// its path from the root, e.g. "node.left.right".
DecisionTree parse_tree(const nlohmann::json& doc, const std::vector<FeatureMeta>& features);
nlohmann::json tree_to_json(const DecisionTree& tree);

/// One root-to-leaf path instantiated on an instance's variables.
struct PathFact {
  std::string model_id;
  Conjunction constraints;
  std::string label;
  Rat confidence;
};

/// One fact per leaf, depth-first, left branch first. Left branches emit the
/// split constraint, right branches its strict complement; nominal splits
/// emit x^v = 1 / x^v = 0.
std::vector<PathFact> enumerate_paths(const DecisionTree& tree, const VarLayout& layout,
                                      std::size_t instance);

struct Prediction {
  std::string label;
  Rat confidence;
};

Prediction predict(const DecisionTree& tree, const NamedPoint& point);

}  // namespace dtr
