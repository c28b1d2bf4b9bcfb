// SPDX-License-Identifier: Apache-2.0
#include "bagchain/consensus/model_cache.hpp"

#include "bagchain/chain/encoding.hpp"
#include "bagchain/ml/bagging.hpp"

namespace bagchain::consensus {

void ModelCache::put(const HashDigest& model_hash, MinerId owner,
                     std::shared_ptr<const std::vector<std::uint8_t>> bytes) {
  CachedModel m;
  m.omega_hash = canonical_hash(*bytes);
  try {
    m.tree = std::make_shared<const ml::DecisionTree>(ml::DecisionTree::deserialize(*bytes));
  } catch (const DecodeError&) {
    m.tree = nullptr;
  }
  m.bytes = std::move(bytes);
  models_[{model_hash, owner}] = std::move(m);
}

void ModelCache::put_local(const ml::TrainedModel& model) {
  CachedModel m;
  m.bytes = model.bytes;
  m.omega_hash = model.omega_hash;
  m.tree = std::make_shared<const ml::DecisionTree>(model.tree);
  models_[{model.model_hash, model.owner}] = std::move(m);
}

const CachedModel* ModelCache::get(const HashDigest& model_hash, MinerId owner) const {
  auto it = models_.find({model_hash, owner});
  return it == models_.end() ? nullptr : &it->second;
}

const std::vector<ml::Label>& ModelCache::predictions(const CachedModel& model, const ml::Dataset& data,
                                                      const HashDigest& data_key, kernels::Exec exec) {
  auto key = std::make_pair(model.omega_hash, data_key);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  return memo_.emplace(key, ml::predict(*model.tree, data, exec)).first->second;
}

Fraction ModelCache::ensemble_accuracy(std::span<const CachedModel* const> models, const ml::Dataset& data,
                                       const HashDigest& data_key, kernels::Exec exec) {
  std::vector<std::vector<ml::Label>> ballots;
  ballots.reserve(models.size());
  for (const auto* m : models) ballots.push_back(predictions(*m, data, data_key, exec));
  auto voted = ml::aggregate(ballots, data.num_classes(), exec);
  return ml::metric(voted, data.labels());
}

const Publication* PublishedData::validation(Height h) const {
  auto it = validation_.find(h);
  return it == validation_.end() ? nullptr : &it->second;
}

const Publication* PublishedData::test(Height h) const {
  auto it = test_.find(h);
  return it == test_.end() ? nullptr : &it->second;
}

}  // namespace bagchain::consensus
