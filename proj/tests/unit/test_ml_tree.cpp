// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <map>
#include <memory>
#include <random>

#include "bagchain/chain/encoding.hpp"
#include "bagchain/chain/seed.hpp"
#include "bagchain/ml/bagging.hpp"
#include "bagchain/ml/model.hpp"
#include "bagchain/ml/split.hpp"
#include "bagchain/ml/synth.hpp"
#include "bagchain/ml/tree.hpp"

using namespace bagchain;
using namespace bagchain::ml;

namespace {

// Exhaustive CART: every feature, every midpoint between distinct values,
// weighted Gini computed directly in long double.
struct OracleNode {
  int feature = -1;
  double threshold = 0;
  Label label = 0;
  std::unique_ptr<OracleNode> left, right;
};

long double gini(const std::vector<std::size_t>& counts, std::size_t n) {
  long double g = 1;
  for (auto c : counts) g -= (static_cast<long double>(c) / n) * (static_cast<long double>(c) / n);
  return g;
}

std::unique_ptr<OracleNode> oracle_build(const Dataset& d, const std::vector<std::size_t>& rows, std::uint32_t depth,
                                         const LearnerSpec& spec) {
  auto node = std::make_unique<OracleNode>();
  std::vector<std::size_t> counts(d.num_classes(), 0);
  for (auto r : rows) ++counts[d.label(r)];
  node->label = static_cast<Label>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  const long double parent = gini(counts, rows.size());
  if (depth >= spec.max_depth || parent == 0) return node;

  long double best = parent;
  int best_f = -1;
  double best_t = 0;
  for (std::size_t f = 0; f < d.cols(); ++f) {
    std::vector<double> vals;
    for (auto r : rows) vals.push_back(d.at(r, f));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
      const double t = vals[i] + (vals[i + 1] - vals[i]) / 2.0;
      std::vector<std::size_t> lc(d.num_classes(), 0), rc(d.num_classes(), 0);
      std::size_t nl = 0, nr = 0;
      for (auto r : rows) {
        if (d.at(r, f) <= t) {
          ++lc[d.label(r)];
          ++nl;
        } else {
          ++rc[d.label(r)];
          ++nr;
        }
      }
      if (nl < spec.min_leaf || nr < spec.min_leaf) continue;
      const long double w = (nl * gini(lc, nl) + nr * gini(rc, nr)) / rows.size();
      if (w < best - 1e-15L) {
        best = w;
        best_f = static_cast<int>(f);
        best_t = t;
      }
    }
  }
  if (best_f < 0) return node;
  node->feature = best_f;
  node->threshold = best_t;
  std::vector<std::size_t> l, r;
  for (auto row : rows) (d.at(row, best_f) <= best_t ? l : r).push_back(row);
  node->left = oracle_build(d, l, depth + 1, spec);
  node->right = oracle_build(d, r, depth + 1, spec);
  return node;
}

void flatten(const OracleNode& n, std::vector<std::pair<int, double>>& out) {
  out.push_back({n.feature, n.feature < 0 ? static_cast<double>(n.label) : n.threshold});
  if (n.feature >= 0) {
    flatten(*n.left, out);
    flatten(*n.right, out);
  }
}

std::vector<std::pair<int, double>> flatten(const DecisionTree& t) {
  std::vector<std::pair<int, double>> out;
  for (const auto& n : t.nodes())
    out.push_back({n.feature, n.is_leaf() ? static_cast<double>(t.leaf_label(n.leaf)) : n.threshold});
  return out;
}

Dataset continuous(std::size_t n, std::size_t d, std::uint32_t classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Dataset out(d, classes);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x) v = g(rng);
    // Labels depend on the first two features with some noise.
    double s = x[0] + 0.5 * x[1] + 0.3 * g(rng);
    Label y = static_cast<Label>(std::clamp(static_cast<int>((s + 1.5) / 3.0 * classes), 0, int(classes) - 1));
    out.push_back(x, y);
  }
  return out;
}

double accuracy(const DecisionTree& t, const Dataset& d) { return metric(predict(t, d), d.labels()).value(); }

}  // namespace

TEST_CASE("tree matches an exhaustive-split oracle") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto d = continuous(80, 3, 3, seed);
    LearnerSpec spec;
    spec.max_depth = 1 + static_cast<std::uint32_t>(seed % 5);
    spec.min_leaf = 1 + static_cast<std::uint32_t>(seed % 3);
    auto tree = train(d, spec);
    std::vector<std::size_t> rows(d.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    auto oracle = oracle_build(d, rows, 0, spec);
    std::vector<std::pair<int, double>> expect;
    flatten(*oracle, expect);
    CHECK(flatten(tree) == expect);
    CHECK(tree.depth() <= spec.max_depth);
  }
}

TEST_CASE("depth-6 tree beats the majority baseline and matches the oracle") {
  auto all = synthesize_dataset({700, 5, 2, 1.0, 21});
  std::vector<std::size_t> idx(all.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::span<const std::size_t> s(idx);
  auto train_set = subset(all, s.first(500), DatasetRole::public_train);
  auto test_set = subset(all, s.subspan(500), DatasetRole::test);
  LearnerSpec spec;
  spec.max_depth = 6;
  auto tree = train(train_set, spec);
  auto cc = test_set.class_counts();
  double baseline = static_cast<double>(*std::max_element(cc.begin(), cc.end())) / test_set.rows();
  CHECK(accuracy(tree, test_set) > baseline);

  std::vector<std::size_t> rows(train_set.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  auto oracle = oracle_build(train_set, rows, 0, spec);
  std::vector<std::pair<int, double>> expect;
  flatten(*oracle, expect);
  CHECK(flatten(tree) == expect);
}

TEST_CASE("trivial trees") {
  Dataset same(1, 3);
  for (int i = 0; i < 10; ++i) {
    double x = i;
    same.push_back({&x, 1}, 2);
  }
  auto t = train(same, {});
  CHECK(t.nodes().size() == 1);
  CHECK(accuracy(t, same) == 1.0);

  Dataset two(1, 2);
  double a = 0, b = 1;
  two.push_back({&a, 1}, 0);
  two.push_back({&b, 1}, 1);
  LearnerSpec spec;
  spec.max_depth = 1;
  spec.min_leaf = 1;
  auto s = train(two, spec);
  CHECK(s.nodes().size() == 3);
  CHECK(s.nodes()[0].threshold == 0.5);
  CHECK(accuracy(s, two) == 1.0);

  Dataset flat(2, 3);
  std::vector<double> x = {1.0, 1.0};
  flat.push_back(x, 0);
  flat.push_back(x, 1);
  flat.push_back(x, 1);
  auto f = train(flat, {});
  CHECK(f.nodes().size() == 1);
  CHECK(predict(f, flat) == std::vector<Label>{1, 1, 1});

  CHECK_THROWS(train(Dataset(2, 2), {}));
  LearnerSpec bad;
  bad.max_depth = 0;
  CHECK_THROWS(train(two, bad));
}

TEST_CASE("huge separation: a stump is near perfect") {
  auto d = synthesize_dataset({400, 4, 2, 50.0, 5});
  LearnerSpec spec;
  spec.max_depth = 1;
  CHECK(accuracy(train(d, spec), d) >= 0.99);
}

TEST_CASE("zero separation: accuracy near chance") {
  double sum = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto tr = synthesize_dataset({600, 4, 4, 0.0, 100 + s});
    auto te = synthesize_dataset({600, 4, 4, 0.0, 200 + s});
    sum += accuracy(train(tr, {}), te);
  }
  CHECK(sum / 10 == doctest::Approx(0.25).epsilon(0.2));
}

TEST_CASE("serialization round trip and model binding") {
  auto d = synthesize_dataset({300, 3, 3, 1.0, 2});
  auto t = train(d, {});
  auto bytes = t.serialize();
  auto back = DecisionTree::deserialize(bytes);
  CHECK(back == t);
  CHECK(back.serialize() == bytes);
  CHECK(train(d, {}).serialize() == bytes);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(DecisionTree::deserialize(trailing), DecodeError);
  std::vector<std::uint8_t> garbage(bytes.begin(), bytes.begin() + bytes.size() / 2);
  CHECK_THROWS_AS(DecisionTree::deserialize(garbage), DecodeError);

  auto m1 = bind_model(t, 1), m2 = bind_model(t, 2);
  CHECK(m1.model_hash != m2.model_hash);
  CHECK(m1.omega_hash == m2.omega_hash);
  CHECK(m1.model_hash == model_hash(bytes, 1));
  auto flipped = bytes;
  flipped[flipped.size() - 1] ^= 1;
  CHECK(model_hash(flipped, 1) != m1.model_hash);
}

TEST_CASE("bagging helps on average") {
  double single = 0, bagged = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto tr = synthesize_dataset({800, 6, 4, 0.8, 300 + s});
    auto te = synthesize_dataset({800, 6, 4, 0.8, 300 + s});  // same centres
    LearnerSpec spec;
    single += accuracy(train(tr, spec), te);
    std::vector<std::vector<Label>> votes;
    for (std::uint64_t b = 0; b < 10; ++b) votes.push_back(predict(train(resample(tr, derive_seed(s, "bag", {b})), spec), te));
    bagged += metric(aggregate(votes, 4), te.labels()).value();
  }
  CHECK(bagged >= single);
}

TEST_CASE("private classes raise per-class recall") {
  // Two miners, each holding private data from two of four classes.
  auto pool = synthesize_dataset({2400, 4, 4, 0.7, 44});
  std::vector<std::size_t> pub, mine_a, mine_b;
  for (std::size_t i = 0; i < pool.rows(); ++i) {
    if (i % 6 == 0)
      pub.push_back(i);
    else if (pool.label(i) < 2)
      mine_a.push_back(i);
    else
      mine_b.push_back(i);
  }
  auto dt = subset(pool, pub, DatasetRole::public_train);
  auto da = concat(dt, subset(pool, mine_a, DatasetRole::private_train), DatasetRole::private_train);
  auto db = concat(dt, subset(pool, mine_b, DatasetRole::private_train), DatasetRole::private_train);
  auto te = synthesize_dataset({2000, 4, 4, 0.7, 44});
  auto pa = predict(train(da, {}), te), pb = predict(train(db, {}), te);
  auto recall = [&](const std::vector<Label>& p, Label lo, Label hi) {
    std::size_t hit = 0, n = 0;
    for (std::size_t i = 0; i < te.rows(); ++i)
      if (te.label(i) >= lo && te.label(i) <= hi) {
        ++n;
        hit += p[i] == te.label(i);
      }
    return static_cast<double>(hit) / n;
  };
  CHECK(recall(pa, 0, 1) > recall(pb, 0, 1));
  CHECK(recall(pb, 2, 3) > recall(pa, 2, 3));
}
