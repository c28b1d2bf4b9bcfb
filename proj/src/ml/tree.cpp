// SPDX-License-Identifier: Apache-2.0
#include "bagchain/ml/tree.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bagchain/chain/encoding.hpp"
#include "bagchain/kernels/predict.hpp"
#include "bagchain/kernels/split.hpp"

namespace bagchain::ml {

void LearnerSpec::validate() const {
  if (max_depth < 1) throw std::invalid_argument("learner max_depth must be >= 1");
  if (min_leaf < 1) throw std::invalid_argument("learner min_leaf must be >= 1");
}

std::uint32_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::function<std::uint32_t(std::uint32_t)> walk = [&](std::uint32_t i) -> std::uint32_t {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return walk(0);
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const LearnerSpec& spec, kernels::Exec exec)
      : data_(data), spec_(spec), exec_(exec) {
    tree_.num_classes_ = data.num_classes();
    tree_.num_features_ = data.cols();
  }

  DecisionTree build() {
    std::vector<std::size_t> rows(data_.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(rows, 0);
    return std::move(tree_);
  }

  static void add_leaf(DecisionTree& tree, std::span<const std::size_t> counts, std::size_t total) {
    TreeNode node;
    node.leaf = static_cast<std::uint32_t>(tree.leaf_labels_.size());
    tree.nodes_.push_back(node);
    for (auto c : counts) tree.leaf_probs_.push_back(total == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total));
    auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
    tree.leaf_labels_.push_back(static_cast<Label>(best));
  }

 private:
  std::uint32_t grow(const std::vector<std::size_t>& rows, std::uint32_t depth) {
    std::vector<std::size_t> counts(data_.num_classes(), 0);
    for (auto r : rows) ++counts[data_.label(r)];
    const auto index = static_cast<std::uint32_t>(tree_.nodes_.size());

    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    std::optional<kernels::SplitCandidate> split;
    if (!pure && depth < spec_.max_depth) {
      split = kernels::best_split(exec_, data_, rows, spec_.min_leaf);
      // Only split when the children are strictly purer than the parent:
      // score > sum_c count_c^2 / n.
      if (split) {
        unsigned __int128 parent_sq = 0;
        for (auto c : counts) parent_sq += static_cast<unsigned __int128>(c) * c;
        kernels::SplitScore parent{parent_sq, rows.size()};
        if (!split->score.better_than(parent)) split.reset();
      }
    }
    if (!split) {
      add_leaf(tree_, counts, rows.size());
      return index;
    }

    tree_.nodes_.push_back(TreeNode{static_cast<std::int32_t>(split->feature), split->threshold, 0, 0, 0});
    std::vector<std::size_t> left, right;
    left.reserve(split->left_count);
    right.reserve(rows.size() - split->left_count);
    for (auto r : rows) (data_.at(r, split->feature) <= split->threshold ? left : right).push_back(r);
    auto l = grow(left, depth + 1);
    auto r = grow(right, depth + 1);
    tree_.nodes_[index].left = l;
    tree_.nodes_[index].right = r;
    return index;
  }

  const Dataset& data_;
  const LearnerSpec& spec_;
  kernels::Exec exec_;
  DecisionTree tree_;
};

DecisionTree DecisionTree::constant(std::uint32_t num_classes, std::size_t num_features, Label label) {
  if (label >= num_classes) throw std::invalid_argument("constant tree label out of range");
  DecisionTree t;
  t.num_classes_ = num_classes;
  t.num_features_ = num_features;
  std::vector<std::size_t> counts(num_classes, 0);
  counts[label] = 1;
  TreeBuilder::add_leaf(t, counts, 1);
  return t;
}

DecisionTree train(const Dataset& data, const LearnerSpec& spec, kernels::Exec exec) {
  spec.validate();
  if (data.empty()) throw DatasetError("cannot train on an empty dataset");
  return TreeBuilder(data, spec, exec).build();
}

std::vector<Label> predict(const DecisionTree& tree, const Dataset& data, kernels::Exec exec) {
  if (tree.num_features() != data.cols()) throw DatasetError("tree and dataset feature counts differ");
  std::vector<Label> out(data.rows());
  kernels::predict_rows(exec, tree, data, out);
  return out;
}

std::vector<std::uint8_t> DecisionTree::serialize() const {
  Encoder enc;
  enc.u32(num_classes_).u64(num_features_).u32(static_cast<std::uint32_t>(nodes_.size()));
  // Children always follow their parent (left subtree first), so a pre-order
  // walk in storage order reproduces the structure.
  for (const auto& n : nodes_) {
    if (n.is_leaf()) {
      enc.u8(1);
      for (double p : leaf_probabilities(n.leaf)) enc.f64(p);
    } else {
      enc.u8(0).u32(static_cast<std::uint32_t>(n.feature)).f64(n.threshold);
    }
  }
  return enc.take();
}

DecisionTree DecisionTree::deserialize(std::span<const std::uint8_t> bytes) {
  Decoder dec(bytes);
  DecisionTree t;
  t.num_classes_ = dec.u32();
  t.num_features_ = dec.u64();
  const auto count = dec.u32();
  if (t.num_classes_ == 0) throw DecodeError("tree with zero classes");
  if (count == 0 || count > bytes.size()) throw DecodeError("implausible tree node count");
  t.nodes_.reserve(count);

  std::function<std::uint32_t()> read = [&]() -> std::uint32_t {
    if (t.nodes_.size() >= count) throw DecodeError("tree node count exceeded");
    const auto index = static_cast<std::uint32_t>(t.nodes_.size());
    auto tag = dec.u8();
    if (tag == 1) {
      TreeNode node;
      node.leaf = static_cast<std::uint32_t>(t.leaf_labels_.size());
      t.nodes_.push_back(node);
      const std::size_t base = t.leaf_probs_.size();
      std::size_t best = 0;
      for (std::uint32_t c = 0; c < t.num_classes_; ++c) {
        t.leaf_probs_.push_back(dec.f64());
        if (t.leaf_probs_[base + c] > t.leaf_probs_[base + best]) best = c;
      }
      t.leaf_labels_.push_back(static_cast<Label>(best));
      return index;
    }
    if (tag != 0) throw DecodeError("bad tree node tag");
    auto feature = dec.u32();
    if (feature >= t.num_features_ || feature > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max()))
      throw DecodeError("tree split feature out of range");
    t.nodes_.push_back(TreeNode{static_cast<std::int32_t>(feature), dec.f64(), 0, 0, 0});
    auto l = read();
    auto r = read();
    t.nodes_[index].left = l;
    t.nodes_[index].right = r;
    return index;
  };
  read();
  if (t.nodes_.size() != count || !dec.done()) throw DecodeError("trailing bytes after tree");
  return t;
}

}  // namespace bagchain::ml
