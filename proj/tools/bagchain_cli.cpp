// SPDX-License-Identifier: Apache-2.0
// bagchain run <scenario> [--seed S] [--seeds K] [--out DIR] [--cfs on|off]
//              [--sweep key=v1,v2,...] [--parallel] [--set key=value]...
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bagchain/harness/report.hpp"
#include "bagchain/harness/scenario.hpp"
#include "bagchain/harness/simulation.hpp"

namespace fs = std::filesystem;
using bagchain::harness::Scenario;
using nlohmann::json;

namespace {

struct Options {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::uint32_t seeds = 1;
  std::string out = "out";
  std::optional<std::string> cfs;
  std::optional<std::string> sweep;
  std::vector<std::string> overrides;
  bool parallel = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::pair<std::string, std::string> key_value(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw bagchain::harness::ScenarioError("expected key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

int run(const Options& opt) {
  Scenario base = bagchain::harness::load_scenario(opt.scenario);
  if (opt.seed) base.seed = *opt.seed;
  if (opt.cfs) base.set("cfs", *opt.cfs);
  if (opt.parallel) base.parallel = true;
  for (const auto& o : opt.overrides) {
    auto [k, v] = key_value(o);
    base.set(k, v, fs::path(opt.scenario).parent_path());
  }

  std::string sweep_key;
  std::vector<std::string> sweep_values{""};
  if (opt.sweep) {
    auto [k, v] = key_value(*opt.sweep);
    sweep_key = k;
    sweep_values = split(v, ',');
  }

  int status = 0;
  for (const auto& value : sweep_values) {
    for (std::uint32_t s = 0; s < opt.seeds; ++s) {
      Scenario sc = base;
      fs::path dir = opt.out;
      if (!sweep_key.empty()) {
        sc.set(sweep_key, value, fs::path(opt.scenario).parent_path());
        dir /= sweep_key + "=" + value;
      }
      sc.seed = base.seed + s;
      if (opt.seeds > 1) dir /= "seed-" + std::to_string(sc.seed);
      sc.validate();

      const auto t0 = std::chrono::steady_clock::now();
      auto result = bagchain::harness::run(sc);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      bagchain::harness::emit(result, dir);
      const auto sum = bagchain::harness::summarise(result);
      json line{{"status", result.timed_out ? "timeout" : "ok"},
                {"out", dir.string()},
                {"seed", sc.seed},
                {"heights", sum.heights},
                {"rounds", sum.rounds},
                {"mean_accuracy", sum.mean_accuracy},
                {"mean_base_accuracy", sum.mean_base_accuracy},
                {"mean_wastage", sum.mean_wastage},
                {"mean_forks", sum.mean_forks},
                {"seconds", secs}};
      if (!sweep_key.empty()) line[sweep_key] = value;
      std::cout << line.dump() << '\n';
      if (result.timed_out) status = 3;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BagChain round-based simulator"};
  app.require_subcommand(1);
  Options opt;
  auto* cmd = app.add_subcommand("run", "Simulate a scenario and write CSV reports");
  cmd->add_option("scenario", opt.scenario, "Scenario file")->required();
  cmd->add_option("--seed", opt.seed, "Master seed (overrides the file)");
  cmd->add_option("--seeds", opt.seeds, "Number of consecutive seeds to run")->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out, "Output directory");
  cmd->add_option("--cfs", opt.cfs, "Cross-fork sharing")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--sweep", opt.sweep, "key=v1,v2,... runs one scenario per value");
  cmd->add_option("--set", opt.overrides, "key=value override, repeatable");
  cmd->add_flag("--parallel", opt.parallel, "Step miners in parallel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cout << json{{"status", "error"}, {"kind", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    return run(opt);
  } catch (const bagchain::harness::ScenarioError& e) {
    std::cout << json{{"status", "error"}, {"kind", "scenario"}, {"message", e.what()}}.dump() << '\n';
  } catch (const bagchain::harness::IoError& e) {
    std::cout << json{{"status", "error"}, {"kind", "io"}, {"message", e.what()}}.dump() << '\n';
  } catch (const std::exception& e) {
    std::cout << json{{"status", "error"}, {"kind", "internal"}, {"message", e.what()}}.dump() << '\n';
  }
  return 1;
}
