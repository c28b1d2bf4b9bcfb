// SPDX-License-Identifier: Apache-2.0
#include "bagchain/harness/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bagchain::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_int(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ScenarioError("scenario key '" + std::string(key) + "': expected an unsigned integer, got '" + std::string(v) + "'");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty())
    throw ScenarioError("scenario key '" + std::string(key) + "': expected a number, got '" + s + "'");
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ScenarioError("scenario key '" + std::string(key) + "': expected on/off, got '" + std::string(v) + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view v) {
  std::filesystem::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) {
    auto candidate = base / p;
    if (std::filesystem::exists(candidate) || !std::filesystem::exists(p)) return candidate;
  }
  return p;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void Scenario::set(std::string_view key, std::string_view value, const std::filesystem::path& base) {
  const auto v = trim(value);
  if (key == "name") name = std::string(v);
  else if (key == "miners") miners = parse_int<std::uint32_t>(key, v);
  else if (key == "heights") heights = parse_int<std::uint64_t>(key, v);
  else if (key == "seed") seed = parse_int<std::uint64_t>(key, v);
  else if (key == "dataset") {
    if (v == "synthetic") source = DataSource::synthetic;
    else if (v == "csv") source = DataSource::csv;
    else throw ScenarioError("scenario key 'dataset': expected synthetic or csv");
  } else if (key == "samples") samples = parse_int<std::size_t>(key, v);
  else if (key == "features") features = parse_int<std::size_t>(key, v);
  else if (key == "classes") classes = parse_int<std::uint32_t>(key, v);
  else if (key == "separation") separation = parse_double(key, v);
  else if (key == "csv_train") csv_train = resolve(base, v);
  else if (key == "csv_test") csv_test = resolve(base, v);
  else if (key == "holdout_fraction") holdout_fraction = parse_double(key, v);
  else if (key == "split") {
    if (v == "iid") split.heterogeneity = ml::Heterogeneity::iid;
    else if (v == "dirichlet") split.heterogeneity = ml::Heterogeneity::dirichlet;
    else throw ScenarioError("scenario key 'split': expected iid or dirichlet");
  } else if (key == "kappa") split.kappa = parse_double(key, v);
  else if (key == "zeta") split.zeta = parse_double(key, v);
  else if (key == "partitions") split.partitions = parse_int<std::uint32_t>(key, v);
  else if (key == "beta") split.beta = parse_double(key, v);
  else if (key == "max_depth") learner.max_depth = parse_int<std::uint32_t>(key, v);
  else if (key == "min_leaf") learner.min_leaf = parse_int<std::uint32_t>(key, v);
  else if (key == "metric_min") {
    try {
      metric_min = Fraction::parse(v);
    } catch (const std::exception& e) {
      throw ScenarioError(std::string("scenario key 'metric_min': ") + e.what());
    }
  } else if (key == "fee") fee = parse_int<std::uint64_t>(key, v);
  else if (key == "keyblock_reward") keyblock_reward = parse_int<std::uint64_t>(key, v);
  else if (key == "queue_length") queue_length = parse_int<std::size_t>(key, v);
  else if (key == "target_exponent") target_exponent = parse_int<unsigned>(key, v);
  else if (key == "hash_trials") hash_trials = parse_int<std::uint32_t>(key, v);
  else if (key == "phase1_rounds") phase1_rounds = parse_int<std::uint64_t>(key, v);
  else if (key == "phase2_rounds") phase2_rounds = parse_int<std::uint64_t>(key, v);
  else if (key == "cfs") cfs = parse_bool(key, v);
  else if (key == "topology") {
    if (v == "full") topology = TopologyKind::full;
    else if (v == "mesh") topology = TopologyKind::mesh;
    else if (v == "file") topology = TopologyKind::file;
    else throw ScenarioError("scenario key 'topology': expected full, mesh or file");
  } else if (key == "edge_probability") edge_probability = parse_double(key, v);
  else if (key == "topology_file") topology_file = resolve(base, v);
  else if (key == "bandwidth") bandwidth = parse_double(key, v);
  else if (key == "miniblock_size") miniblock_size = parse_double(key, v);
  else if (key == "ensembleblock_size") ensembleblock_size = parse_double(key, v);
  else if (key == "keyblock_size") keyblock_size = parse_double(key, v);
  else if (key == "model_size") model_size = parse_double(key, v);
  else if (key == "dataset_unit_cost") dataset_unit_cost = parse_double(key, v);
  else if (key == "keyblock_delay") keyblock_delay = parse_int<std::uint64_t>(key, v);
  else if (key == "round_budget") round_budget = parse_int<std::uint64_t>(key, v);
  else if (key == "parallel") parallel = parse_bool(key, v);
  else if (key.rfind("strategy.", 0) == 0) {
    auto id = parse_int<std::uint32_t>(key, key.substr(9));
    try {
      strategies[id] = consensus::parse_strategy(v);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
  } else {
    throw ScenarioError("unknown scenario key '" + std::string(key) + "'");
  }
}

void Scenario::validate() const {
  if (miners == 0) throw ScenarioError("miners must be at least 1");
  if (heights == 0) throw ScenarioError("heights must be at least 1");
  if (source == DataSource::synthetic) {
    if (classes < 2 || features < 1 || samples < classes)
      throw ScenarioError("synthetic data needs classes >= 2, features >= 1 and samples >= classes");
  } else if (csv_train.empty()) {
    throw ScenarioError("dataset = csv needs csv_train");
  }
  if (csv_test.empty() && !(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw ScenarioError("holdout_fraction must lie in (0, 1)");
  try {
    split.validate();
    learner.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  if (!metric_min.in_unit_interval()) throw ScenarioError("metric_min must lie in [0, 1]");
  if (queue_length == 0) throw ScenarioError("queue_length must be at least 1");
  if (target_exponent < 1 || target_exponent > 256) throw ScenarioError("target_exponent must lie in [1, 256]");
  if (hash_trials == 0) throw ScenarioError("hash_trials must be at least 1");
  if (phase1_rounds == 0 || phase2_rounds == 0) throw ScenarioError("phase durations must be positive");
  if (!(bandwidth > 0.0)) throw ScenarioError("bandwidth must be positive");
  if (topology == TopologyKind::mesh && !(edge_probability > 0.0 && edge_probability <= 1.0))
    throw ScenarioError("edge_probability must lie in (0, 1]");
  if (topology == TopologyKind::file && topology_file.empty()) throw ScenarioError("topology = file needs topology_file");
  for (const auto& [id, s] : strategies)
    if (id >= miners) throw ScenarioError("strategy assigned to a miner that does not exist");
}

double Scenario::expected_rounds_per_height() const {
  // p = 1 - (1 - T/2^256)^(q N) with T = 2^e - 1.
  const double per_trial = std::ldexp(1.0, static_cast<int>(target_exponent) - 256);
  const double trials = static_cast<double>(hash_trials) * miners;
  const double p = -std::expm1(trials * std::log1p(-std::min(per_trial, 1.0 - 1e-16)));
  return static_cast<double>(phase1_rounds + phase2_rounds) + 1.0 / p;
}

std::uint64_t Scenario::effective_round_budget() const {
  if (round_budget > 0) return round_budget;
  return static_cast<std::uint64_t>(std::ceil(50.0 * expected_rounds_per_height())) * heights;
}

consensus::Strategy Scenario::strategy_of(std::uint32_t miner) const {
  auto it = strategies.find(miner);
  return it == strategies.end() ? consensus::Strategy::honest : it->second;
}

std::string Scenario::to_text() const {
  std::ostringstream os;
  os << "name = " << name << "\n"
     << "miners = " << miners << "\n"
     << "heights = " << heights << "\n"
     << "seed = " << seed << "\n"
     << "dataset = " << (source == DataSource::synthetic ? "synthetic" : "csv") << "\n";
  if (source == DataSource::synthetic) {
    os << "samples = " << samples << "\nfeatures = " << features << "\nclasses = " << classes
       << "\nseparation = " << fmt(separation) << "\n";
  } else {
    os << "csv_train = " << csv_train.string() << "\n";
    if (!csv_test.empty()) os << "csv_test = " << csv_test.string() << "\n";
  }
  os << "holdout_fraction = " << fmt(holdout_fraction) << "\n"
     << "split = " << (split.heterogeneity == ml::Heterogeneity::iid ? "iid" : "dirichlet") << "\n"
     << "kappa = " << fmt(split.kappa) << "\nzeta = " << fmt(split.zeta) << "\npartitions = " << split.partitions
     << "\nbeta = " << fmt(split.beta) << "\n"
     << "max_depth = " << learner.max_depth << "\nmin_leaf = " << learner.min_leaf << "\n"
     << "metric_min = " << metric_min.num << "/" << metric_min.den << "\n"
     << "fee = " << fee << "\nkeyblock_reward = " << keyblock_reward << "\nqueue_length = " << queue_length << "\n"
     << "target_exponent = " << target_exponent << "\nhash_trials = " << hash_trials << "\n"
     << "phase1_rounds = " << phase1_rounds << "\nphase2_rounds = " << phase2_rounds << "\n"
     << "cfs = " << (cfs ? "on" : "off") << "\n"
     << "topology = " << (topology == TopologyKind::full ? "full" : topology == TopologyKind::mesh ? "mesh" : "file")
     << "\n";
  if (topology == TopologyKind::mesh) os << "edge_probability = " << fmt(edge_probability) << "\n";
  if (topology == TopologyKind::file) os << "topology_file = " << topology_file.string() << "\n";
  os << "bandwidth = " << fmt(bandwidth) << "\nminiblock_size = " << fmt(miniblock_size)
     << "\nensembleblock_size = " << fmt(ensembleblock_size) << "\nkeyblock_size = " << fmt(keyblock_size)
     << "\nmodel_size = " << fmt(model_size) << "\ndataset_unit_cost = " << fmt(dataset_unit_cost)
     << "\nkeyblock_delay = " << keyblock_delay << "\n";
  for (const auto& [id, s] : strategies) os << "strategy." << id << " = " << consensus::to_string(s) << "\n";
  os << "round_budget = " << effective_round_budget() << "\n";
  return os.str();
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base) {
  Scenario sc;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ScenarioError("scenario line " + std::to_string(lineno) + ": expected key = value");
    sc.set(trim(line.substr(0, eq)), line.substr(eq + 1), base);
    if (end == text.size()) break;
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

}  // namespace bagchain::harness
