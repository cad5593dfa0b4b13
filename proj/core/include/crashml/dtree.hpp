#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "crashml/classifier.hpp"
#include "crashml/dataset.hpp"

namespace crashml {

struct TreeParams {
  int min_leaf = 2;
  double pruning_confidence = 0.25;  // in (0, 0.5]
  bool use_laplace = true;
};

/// Multiway categorical decision tree in the C4.5 mold: gain-ratio splits,
/// pessimistic-error pruning by subtree replacement, frequency leaves.
class DecisionTree {
 public:
  struct Node {
    std::array<std::int64_t, 2> counts{0, 0};  // [not_fatal, fatal]
    int split_attribute = -1;                  // -1 marks a leaf
    // Indexed by category; null children mean the category was unseen at
    // training time and routes to this node's own counts (the fallback).
    std::vector<std::unique_ptr<Node>> children;

    bool is_leaf() const { return split_attribute < 0; }
    std::int64_t total() const { return counts[0] + counts[1]; }
  };

  DecisionTree() = default;
  DecisionTree(std::unique_ptr<Node> root, bool laplace)
      : root_(std::move(root)), laplace_(laplace) {}

  const Node& root() const { return *root_; }
  bool has_root() const { return root_ != nullptr; }
  bool laplace() const { return laplace_; }

  std::size_t node_count() const;
  int depth() const;

 private:
  std::unique_ptr<Node> root_;
  bool laplace_ = true;

  friend DecisionTree grow_tree(const Dataset&, const TreeParams&);
  friend void prune_tree(DecisionTree&, double);
};

/// Shannon entropy of the counts, in bits; 0 for empty or pure counts.
double entropy(std::span<const std::int64_t> class_counts);

/// Information gain of splitting on `attribute`, divided by the split
/// information; 0 when only one category is observed.
double gain_ratio(const Dataset& dataset, std::string_view attribute);

/// Unpruned tree: recursively split on the positive-gain attribute with the
/// highest gain ratio (ties to schema order); stop when the node is pure,
/// no attribute has positive gain, or the chosen split would create a
/// nonempty child smaller than min_leaf.
DecisionTree grow_tree(const Dataset& dataset, const TreeParams& params);

/// Bottom-up subtree replacement: a subtree collapses to a leaf whenever the
/// leaf's pessimistic error estimate (binomial upper confidence bound at the
/// given confidence) does not exceed the subtree's.
void prune_tree(DecisionTree& tree, double confidence);

/// grow_tree followed by prune_tree.
DecisionTree train_tree(const Dataset& dataset, const TreeParams& params);

/// Class distribution at the leaf reached by `record`; Laplace-smoothed
/// ((c_i + 1)/(n + 2)) when the tree was trained with use_laplace. A
/// category unseen at a node falls back to that node's own distribution.
ClassProbs tree_predict_proba(const DecisionTree& tree, const CrashRecord& record);

/// Pessimistic error estimate of the whole tree on its training data, using
/// the same upper confidence bound as pruning. Pruning never increases it.
double tree_pessimistic_errors(const DecisionTree& tree, double confidence);

/// Upper confidence bound helper: expected additional errors on top of the
/// observed `errors` among `n` training rows, at the given confidence.
double pessimistic_added_errors(double n, double errors, double confidence);

}  // namespace crashml
