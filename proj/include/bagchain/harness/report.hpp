// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>

#include "bagchain/harness/simulation.hpp"

namespace bagchain::harness {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Summary {
  std::size_t heights = 0;
  Round rounds = 0;
  bool timed_out = false;
  double mean_accuracy = 0;
  double mean_best_possible = 0;
  double mean_gap = 0;  // best_possible - accuracy
  double mean_wastage = 0;
  double mean_forks = 0;
  double mean_rounds = 0;
  double mean_base_accuracy = 0;  // over every (height, miner) base model
  double mean_dummy_accuracy = 0;
  std::size_t empty_keyblocks = 0;
  bool fee_conserved = true;
};

Summary summarise(const RunResult& result);

void write_heights_csv(std::ostream& out, std::span<const HeightRecord> records);
void write_base_accuracy_csv(std::ostream& out, std::span<const HeightRecord> records);
void write_rewards_csv(std::ostream& out, std::span<const RewardLine> rewards);
void write_chain_csv(std::ostream& out, std::span<const HeightRecord> records);
void write_summary(std::ostream& out, const RunResult& result);

/// heights.csv, base_accuracy.csv, rewards.csv, chain.csv and summary.txt
/// under `dir` (created if missing). Throws IoError.
void emit(const RunResult& result, const std::filesystem::path& dir);

}  // namespace bagchain::harness
