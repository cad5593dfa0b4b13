#include "crashml/dtree.hpp"

#include <algorithm>
#include <cmath>

#include "crashml/mathutil.hpp"

namespace crashml {

double entropy(std::span<const std::int64_t> class_counts) {
  std::int64_t total = 0;
  for (const std::int64_t c : class_counts) {
    if (c < 0) throw ArgumentError("entropy: negative count");
    total += c;
  }
  if (total == 0) return 0.0;
  double h = 0.0;
  for (const std::int64_t c : class_counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

struct SplitScore {
  double gain = 0.0;
  double ratio = 0.0;
};

// Gain and gain ratio of splitting `rows` on attribute `attr`.
SplitScore score_split(const Dataset& data, std::span<const std::size_t> rows,
                       std::size_t attr) {
  const std::size_t domain = data.schema().inputs()[attr].domain.size();
  std::vector<std::array<std::int64_t, 2>> buckets(domain, {0, 0});
  std::array<std::int64_t, 2> parent{0, 0};
  for (const std::size_t r : rows) {
    const CrashRecord& rec = data.row(r);
    ++buckets[rec.values[attr]][class_index(rec.label)];
    ++parent[class_index(rec.label)];
  }
  const double n = static_cast<double>(rows.size());
  const double parent_entropy = entropy(parent);

  double children_entropy = 0.0;
  double split_info = 0.0;
  for (const auto& b : buckets) {
    const std::int64_t bn = b[0] + b[1];
    if (bn == 0) continue;
    const double frac = static_cast<double>(bn) / n;
    children_entropy += frac * entropy(b);
    split_info -= frac * std::log2(frac);
  }
  SplitScore s;
  s.gain = parent_entropy - children_entropy;
  s.ratio = split_info > 0.0 ? s.gain / split_info : 0.0;
  return s;
}

constexpr double kGainEps = 1e-12;

using Node = DecisionTree::Node;

std::unique_ptr<Node> grow(const Dataset& data, std::vector<std::size_t>& rows,
                           const TreeParams& params) {
  auto node = std::make_unique<Node>();
  for (const std::size_t r : rows) ++node->counts[class_index(data.row(r).label)];

  if (node->counts[0] == 0 || node->counts[1] == 0) return node;  // pure

  // Best positive-gain attribute by gain ratio, ties to schema order.
  const std::size_t n_attr = data.schema().attribute_count();
  int best_attr = -1;
  double best_ratio = 0.0;
  for (std::size_t a = 0; a < n_attr; ++a) {
    const SplitScore s = score_split(data, rows, a);
    if (s.gain <= kGainEps) continue;
    if (s.ratio > best_ratio + kGainEps) {
      best_ratio = s.ratio;
      best_attr = static_cast<int>(a);
    }
  }
  if (best_attr < 0) return node;

  // Partition the rows by category of the chosen attribute.
  const std::size_t domain = data.schema().inputs()[static_cast<std::size_t>(best_attr)].domain.size();
  std::vector<std::vector<std::size_t>> parts(domain);
  for (const std::size_t r : rows) {
    parts[data.row(r).values[static_cast<std::size_t>(best_attr)]].push_back(r);
  }
  for (const auto& part : parts) {
    if (!part.empty() && part.size() < static_cast<std::size_t>(params.min_leaf)) {
      return node;  // the split would create an undersized child
    }
  }

  node->split_attribute = best_attr;
  node->children.resize(domain);
  rows.clear();
  rows.shrink_to_fit();
  for (std::size_t c = 0; c < domain; ++c) {
    if (!parts[c].empty()) node->children[c] = grow(data, parts[c], params);
  }
  return node;
}

double leaf_pessimistic_errors(const Node& node, double confidence) {
  const double n = static_cast<double>(node.total());
  const double e = static_cast<double>(node.total() - std::max(node.counts[0], node.counts[1]));
  return e + pessimistic_added_errors(n, e, confidence);
}

// Post-order subtree replacement; returns the node's pessimistic estimate
// after any collapse.
double prune(Node& node, double confidence) {
  if (node.is_leaf()) return leaf_pessimistic_errors(node, confidence);

  double subtree = 0.0;
  for (auto& child : node.children) {
    if (child) subtree += prune(*child, confidence);
  }
  const double as_leaf = leaf_pessimistic_errors(node, confidence);
  if (as_leaf <= subtree) {
    node.split_attribute = -1;
    node.children.clear();
    return as_leaf;
  }
  return subtree;
}

double estimate(const Node& node, double confidence) {
  if (node.is_leaf()) return leaf_pessimistic_errors(node, confidence);
  double subtree = 0.0;
  for (const auto& child : node.children) {
    if (child) subtree += estimate(*child, confidence);
  }
  return subtree;
}

std::size_t count_nodes(const Node& node) {
  std::size_t n = 1;
  for (const auto& child : node.children) {
    if (child) n += count_nodes(*child);
  }
  return n;
}

int node_depth(const Node& node) {
  int d = 0;
  for (const auto& child : node.children) {
    if (child) d = std::max(d, 1 + node_depth(*child));
  }
  return d;
}

}  // namespace

double pessimistic_added_errors(double n, double errors, double confidence) {
  // Binomial upper confidence bound on the true error rate, following the
  // classic C4.5 treatment: exact for zero observed errors, a continuity-
  // corrected normal bound otherwise, with linear interpolation below one
  // error.
  if (n <= 0.0) return 0.0;
  if (errors < 1e-12) {
    return n * (1.0 - std::pow(confidence, 1.0 / n));
  }
  if (errors < 1.0) {
    const double base = n * (1.0 - std::pow(confidence, 1.0 / n));
    return base + errors * (pessimistic_added_errors(n, 1.0, confidence) - base);
  }
  if (errors + 0.5 >= n) return std::max(0.0, n - errors);
  const double z = normal_quantile(1.0 - confidence);
  const double f = (errors + 0.5) / n;
  const double z2 = z * z;
  const double upper =
      (f + z2 / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z2 / (4.0 * n * n))) /
      (1.0 + z2 / n);
  return upper * n - errors;
}

double gain_ratio(const Dataset& dataset, std::string_view attribute) {
  if (dataset.empty()) throw ArgumentError("gain_ratio: dataset is empty");
  const auto attr = dataset.schema().input_index(attribute);
  if (!attr) throw ArgumentError("gain_ratio: unknown attribute '" + std::string(attribute) + "'");
  std::vector<std::size_t> rows(dataset.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return score_split(dataset, rows, *attr).ratio;
}

DecisionTree grow_tree(const Dataset& dataset, const TreeParams& params) {
  if (dataset.empty()) throw ArgumentError("grow_tree: dataset is empty");
  if (params.min_leaf < 1) throw ArgumentError("grow_tree: min_leaf must be >= 1");
  std::vector<std::size_t> rows(dataset.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  DecisionTree tree;
  tree.root_ = grow(dataset, rows, params);
  tree.laplace_ = params.use_laplace;
  return tree;
}

void prune_tree(DecisionTree& tree, double confidence) {
  if (!tree.has_root()) throw StateError("prune_tree: tree has no root");
  if (!(confidence > 0.0 && confidence <= 0.5)) {
    throw ArgumentError("prune_tree: confidence must lie in (0, 0.5]");
  }
  prune(*tree.root_, confidence);
}

DecisionTree train_tree(const Dataset& dataset, const TreeParams& params) {
  DecisionTree tree = grow_tree(dataset, params);
  prune_tree(tree, params.pruning_confidence);
  return tree;
}

ClassProbs tree_predict_proba(const DecisionTree& tree, const CrashRecord& record) {
  if (!tree.has_root()) throw StateError("tree_predict_proba: tree has no root");
  const Node* node = &tree.root();
  while (!node->is_leaf()) {
    const std::uint16_t cat = record.values[static_cast<std::size_t>(node->split_attribute)];
    const Node* child =
        cat < node->children.size() ? node->children[cat].get() : nullptr;
    if (!child) break;  // unseen category: fall back to this node's counts
    node = child;
  }
  const double c0 = static_cast<double>(node->counts[0]);
  const double c1 = static_cast<double>(node->counts[1]);
  if (tree.laplace()) {
    const double n = c0 + c1 + 2.0;
    return {(c0 + 1.0) / n, (c1 + 1.0) / n};
  }
  const double n = c0 + c1;
  return {c0 / n, c1 / n};
}

double tree_pessimistic_errors(const DecisionTree& tree, double confidence) {
  if (!tree.has_root()) throw StateError("tree_pessimistic_errors: tree has no root");
  return estimate(tree.root(), confidence);
}

std::size_t DecisionTree::node_count() const {
  return root_ ? count_nodes(*root_) : 0;
}

int DecisionTree::depth() const { return root_ ? node_depth(*root_) : 0; }

}  // namespace crashml
