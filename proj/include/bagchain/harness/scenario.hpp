// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bagchain/chain/fraction.hpp"
#include "bagchain/consensus/params.hpp"
#include "bagchain/ml/split.hpp"
#include "bagchain/ml/tree.hpp"

namespace bagchain::harness {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TopologyKind { full, mesh, file };
enum class DataSource { synthetic, csv };

/// Everything a run depends on. Parsed from a flat `key = value` file; see
/// scenarios/README.md for the keys.
struct Scenario {
  std::string name = "unnamed";
  std::uint32_t miners = 10;
  std::uint64_t heights = 20;
  std::uint64_t seed = 1;

  DataSource source = DataSource::synthetic;
  std::size_t samples = 5000;
  std::size_t features = 10;
  std::uint32_t classes = 5;
  double separation = 1.0;
  std::filesystem::path csv_train;
  std::filesystem::path csv_test;  // empty: hold out from csv_train
  double holdout_fraction = 0.2;

  ml::SplitPlan split;
  ml::LearnerSpec learner;
  Fraction metric_min{0, 1};
  std::uint64_t fee = 100;
  std::uint64_t keyblock_reward = 50;
  std::size_t queue_length = 4;

  unsigned target_exponent = 244;
  std::uint32_t hash_trials = 1;
  std::uint64_t phase1_rounds = 100;
  std::uint64_t phase2_rounds = 10;
  bool cfs = false;

  TopologyKind topology = TopologyKind::full;
  double edge_probability = 0.3;
  std::filesystem::path topology_file;
  double bandwidth = 0.5;
  double miniblock_size = 2.0;
  double ensembleblock_size = 2.0;
  double keyblock_size = 6.0;
  double model_size = 1.0;
  double dataset_unit_cost = 0.0;
  std::uint64_t keyblock_delay = 0;

  std::map<std::uint32_t, consensus::Strategy> strategies;  // absent = honest
  std::uint64_t round_budget = 0;                            // 0 = derived
  bool parallel = false;                                     // step miners concurrently

  /// Applies one `key = value` assignment. Relative paths resolve against `base`.
  void set(std::string_view key, std::string_view value, const std::filesystem::path& base = {});
  /// Throws ScenarioError on any inconsistent setting.
  void validate() const;
  /// Expected rounds per height: both fixed phases plus 1/p for the
  /// network-wide per-round PoW success probability p.
  [[nodiscard]] double expected_rounds_per_height() const;
  /// round_budget, or 50 expected heights' worth of rounds per height.
  [[nodiscard]] std::uint64_t effective_round_budget() const;
  [[nodiscard]] consensus::Strategy strategy_of(std::uint32_t miner) const;
  /// Canonical `key = value` listing, stable across runs.
  [[nodiscard]] std::string to_text() const;
};

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base = {});
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace bagchain::harness
