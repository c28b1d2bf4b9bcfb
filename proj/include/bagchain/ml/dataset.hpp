// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "bagchain/chain/hash.hpp"

namespace bagchain::ml {

using Label = std::uint32_t;

enum class DatasetRole : std::uint8_t {
  full_train = 0,  // the original training set before splitting
  public_train = 1,
  private_train = 2,
  validation = 3,
  test = 4,
  held_out = 5,  // original test set before the validation/test halving
};

class DatasetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major feature matrix plus label vector.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t cols, std::uint32_t num_classes, DatasetRole role = DatasetRole::full_train);
  /// Validates row count against labels and every label against num_classes.
  Dataset(std::vector<double> features, std::vector<Label> labels, std::size_t cols,
          std::uint32_t num_classes, DatasetRole role = DatasetRole::full_train);

  [[nodiscard]] std::size_t rows() const { return labels_.size(); }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::uint32_t num_classes() const { return num_classes_; }
  [[nodiscard]] DatasetRole role() const { return role_; }
  [[nodiscard]] bool empty() const { return labels_.empty(); }

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * cols_, cols_};
  }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return features_[i * cols_ + j]; }
  [[nodiscard]] Label label(std::size_t i) const { return labels_[i]; }
  [[nodiscard]] std::span<const double> features() const { return features_; }
  [[nodiscard]] std::span<const Label> labels() const { return labels_; }

  void push_back(std::span<const double> x, Label y);
  void reserve(std::size_t n);
  void set_role(DatasetRole role) { role_ = role; }

  /// Per-class sample counts.
  [[nodiscard]] std::vector<std::size_t> class_counts() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t cols_ = 0;
  std::uint32_t num_classes_ = 0;
  DatasetRole role_ = DatasetRole::full_train;
  std::vector<double> features_;
  std::vector<Label> labels_;
};

Dataset subset(const Dataset& data, std::span<const std::size_t> rows, DatasetRole role);
/// Rows of `a` followed by rows of `b`; shapes and class counts must agree.
Dataset concat(const Dataset& a, const Dataset& b, DatasetRole role);

/// Canonical hash of role, shape, class count, features and labels.
HashDigest commitment(const Dataset& data);

/// CSV with header `f0,...,f{d-1},label`. num_classes = 0 infers max label + 1.
Dataset load_csv(const std::filesystem::path& path, std::uint32_t num_classes = 0,
                 DatasetRole role = DatasetRole::full_train);
void save_csv(const Dataset& data, const std::filesystem::path& path);

}  // namespace bagchain::ml
