// SPDX-License-Identifier: Apache-2.0
#include "bagchain/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace bagchain::harness {

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

Summary summarise(const RunResult& result) {
  Summary s;
  s.heights = result.records.size();
  s.rounds = result.rounds;
  s.timed_out = result.timed_out;
  s.fee_conserved = result.fee_conserved();
  std::size_t base_n = 0;
  for (const auto& r : result.records) {
    s.mean_accuracy += r.accuracy.value();
    s.mean_best_possible += r.best_possible.value();
    s.mean_gap += r.best_possible.value() - r.accuracy.value();
    s.mean_wastage += static_cast<double>(r.wastage());
    s.mean_forks += static_cast<double>(r.forks);
    s.mean_rounds += static_cast<double>(r.rounds);
    s.mean_dummy_accuracy += r.dummy_accuracy.value();
    for (const auto& [miner, acc] : r.base_accuracy) {
      s.mean_base_accuracy += acc.value();
      ++base_n;
    }
    if (r.empty_keyblock) ++s.empty_keyblocks;
  }
  if (s.heights > 0) {
    const auto n = static_cast<double>(s.heights);
    s.mean_accuracy /= n;
    s.mean_best_possible /= n;
    s.mean_gap /= n;
    s.mean_wastage /= n;
    s.mean_forks /= n;
    s.mean_rounds /= n;
    s.mean_dummy_accuracy /= n;
  }
  if (base_n > 0) s.mean_base_accuracy /= static_cast<double>(base_n);
  return s;
}

void write_heights_csv(std::ostream& out, std::span<const HeightRecord> records) {
  out << "height,accuracy,best_possible,wastage,forks,rounds\n";
  for (const auto& r : records)
    out << r.height << ',' << r.accuracy.to_string() << ',' << r.best_possible.to_string() << ',' << r.wastage()
        << ',' << r.forks << ',' << r.rounds << '\n';
}

void write_base_accuracy_csv(std::ostream& out, std::span<const HeightRecord> records) {
  out << "height,miner,accuracy\n";
  for (const auto& r : records)
    for (const auto& [miner, acc] : r.base_accuracy) out << r.height << ',' << miner << ',' << acc.to_string() << '\n';
}

void write_rewards_csv(std::ostream& out, std::span<const RewardLine> rewards) {
  out << "miner,fee_shares,keyblock_rewards,total\n";
  for (const auto& l : rewards)
    out << l.miner << ',' << l.fee_shares << ',' << l.keyblock_rewards << ',' << l.fee_shares + l.keyblock_rewards
        << '\n';
}

void write_chain_csv(std::ostream& out, std::span<const HeightRecord> records) {
  out << "height,keyblock,miner,miniblocks_total,miniblocks_used,empty\n";
  for (const auto& r : records)
    out << r.height << ',' << r.keyblock.hex() << ',' << r.keyblock_miner << ',' << r.miniblocks_total << ','
        << r.miniblocks_used << ',' << (r.empty_keyblock ? 1 : 0) << '\n';
}

void write_summary(std::ostream& out, const RunResult& result) {
  const auto s = summarise(result);
  out << "scenario " << result.scenario.name << '\n'
      << "seed " << result.scenario.seed << '\n'
      << "miners " << result.scenario.miners << '\n'
      << "cfs " << (result.scenario.cfs ? "on" : "off") << '\n'
      << "heights " << s.heights << '\n'
      << "rounds " << s.rounds << '\n'
      << "timed_out " << (s.timed_out ? "yes" : "no") << '\n'
      << "keyblocks_generated " << result.keyblocks_generated << '\n'
      << "empty_keyblocks " << s.empty_keyblocks << '\n'
      << "messages_delivered " << result.messages_delivered << '\n'
      << "rejected " << result.rejected << '\n'
      << "mean_accuracy " << fixed(s.mean_accuracy) << '\n'
      << "mean_best_possible " << fixed(s.mean_best_possible) << '\n'
      << "mean_gap " << fixed(s.mean_gap) << '\n'
      << "mean_base_accuracy " << fixed(s.mean_base_accuracy) << '\n'
      << "mean_dummy_accuracy " << fixed(s.mean_dummy_accuracy) << '\n'
      << "mean_wastage " << fixed(s.mean_wastage) << '\n'
      << "mean_forks " << fixed(s.mean_forks) << '\n'
      << "mean_rounds_per_height " << fixed(s.mean_rounds) << '\n'
      << "fees_paid " << result.fees_paid << '\n'
      << "fees_due " << result.fees_due << '\n'
      << "fee_conserved " << (s.fee_conserved ? "yes" : "no") << '\n';
}

void emit(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "heights.csv", [&](std::ostream& o) { write_heights_csv(o, result.records); });
  write_file(dir / "base_accuracy.csv", [&](std::ostream& o) { write_base_accuracy_csv(o, result.records); });
  write_file(dir / "rewards.csv", [&](std::ostream& o) { write_rewards_csv(o, result.rewards); });
  write_file(dir / "chain.csv", [&](std::ostream& o) { write_chain_csv(o, result.records); });
  write_file(dir / "summary.txt", [&](std::ostream& o) { write_summary(o, result); });
}

}  // namespace bagchain::harness
