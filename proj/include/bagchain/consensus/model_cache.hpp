// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "bagchain/chain/fraction.hpp"
#include "bagchain/chain/hash.hpp"
#include "bagchain/chain/types.hpp"
#include "bagchain/kernels/exec.hpp"
#include "bagchain/ml/dataset.hpp"
#include "bagchain/ml/model.hpp"

namespace bagchain::consensus {

/// Parameters received for a claimed (model_hash, owner) pair. The bytes are
/// kept as delivered; whether they match the claim is the validator's call.
struct CachedModel {
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;
  HashDigest omega_hash;
  std::shared_ptr<const ml::DecisionTree> tree;  // null when the bytes do not decode
};

/// One miner's store of fetched model parameters with a prediction memo keyed
/// by (parameters, dataset commitment).
class ModelCache {
 public:
  void put(const HashDigest& model_hash, MinerId owner, std::shared_ptr<const std::vector<std::uint8_t>> bytes);
  void put_local(const ml::TrainedModel& model);
  [[nodiscard]] const CachedModel* get(const HashDigest& model_hash, MinerId owner) const;
  [[nodiscard]] std::size_t size() const { return models_.size(); }

  /// Predicted labels of `model` on `data`; `data_key` identifies the dataset.
  const std::vector<ml::Label>& predictions(const CachedModel& model, const ml::Dataset& data,
                                            const HashDigest& data_key, kernels::Exec exec);

  /// Accuracy of the majority vote of `models` on `data`.
  Fraction ensemble_accuracy(std::span<const CachedModel* const> models, const ml::Dataset& data,
                             const HashDigest& data_key, kernels::Exec exec);

 private:
  std::map<std::pair<HashDigest, MinerId>, CachedModel> models_;
  std::map<std::pair<HashDigest, HashDigest>, std::vector<ml::Label>> memo_;
};

struct Publication {
  std::shared_ptr<const ml::Dataset> data;
  Round timestamp = 0;
};

/// Validation and test sets this miner has received, by height.
class PublishedData {
 public:
  void set_validation(Height h, Publication p) { validation_[h] = std::move(p); }
  void set_test(Height h, Publication p) { test_[h] = std::move(p); }
  [[nodiscard]] const Publication* validation(Height h) const;
  [[nodiscard]] const Publication* test(Height h) const;

 private:
  std::map<Height, Publication> validation_;
  std::map<Height, Publication> test_;
};

}  // namespace bagchain::consensus
