// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bagchain/kernels/exec.hpp"
#include "bagchain/ml/dataset.hpp"

namespace bagchain::ml {

struct LearnerSpec {
  std::uint32_t max_depth = 8;
  std::uint32_t min_leaf = 5;

  /// Throws std::invalid_argument unless max_depth >= 1 and min_leaf >= 1.
  void validate() const;
  bool operator==(const LearnerSpec&) const = default;
};

/// Internal nodes route x[feature] <= threshold to `left`.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t leaf = 0;  // index into the leaf table when feature == -1

  [[nodiscard]] bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// CART classification tree. Nodes are stored in pre-order, root first.
class DecisionTree {
 public:
  DecisionTree() = default;

  [[nodiscard]] std::uint32_t num_classes() const { return num_classes_; }
  [[nodiscard]] std::size_t num_features() const { return num_features_; }
  [[nodiscard]] std::span<const TreeNode> nodes() const { return nodes_; }
  [[nodiscard]] std::size_t leaf_count() const { return leaf_labels_.size(); }
  [[nodiscard]] std::span<const double> leaf_probabilities(std::uint32_t leaf) const {
    return {leaf_probs_.data() + static_cast<std::size_t>(leaf) * num_classes_, num_classes_};
  }
  [[nodiscard]] Label leaf_label(std::uint32_t leaf) const { return leaf_labels_[leaf]; }
  [[nodiscard]] std::uint32_t depth() const;

  [[nodiscard]] Label predict_row(std::span<const double> x) const {
    std::uint32_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const auto& n = nodes_[i];
      i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return leaf_labels_[nodes_[i].leaf];
  }

  /// Pre-order node array: internal = (0x00, u32 feature, f64 threshold),
  /// leaf = (0x01, num_classes x f64 probability). Prefixed by header fields.
  [[nodiscard]] std::vector<std::uint8_t> serialize() const;
  /// Throws DecodeError on malformed or trailing bytes.
  static DecisionTree deserialize(std::span<const std::uint8_t> bytes);

  /// Builds a single-leaf tree; used for degenerate data and in tests.
  static DecisionTree constant(std::uint32_t num_classes, std::size_t num_features, Label label);

  bool operator==(const DecisionTree&) const = default;

 private:
  friend class TreeBuilder;

  std::uint32_t num_classes_ = 0;
  std::size_t num_features_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<double> leaf_probs_;
  std::vector<Label> leaf_labels_;
};

/// Greedy CART minimising Gini impurity. Ties between splits resolve to the
/// smallest feature index, then the smallest threshold. Data whose features
/// are all constant yields a single leaf predicting the majority class.
DecisionTree train(const Dataset& data, const LearnerSpec& spec,
                   kernels::Exec exec = kernels::Exec::serial);

std::vector<Label> predict(const DecisionTree& tree, const Dataset& data,
                           kernels::Exec exec = kernels::Exec::serial);

}  // namespace bagchain::ml
