#include "guardfed/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace guardfed {

std::string_view to_string(Aggregator a) {
  switch (a) {
    case Aggregator::FedAvg: return "fedavg";
    case Aggregator::Median: return "median";
    case Aggregator::FLTrust: return "fltrust";
    case Aggregator::GuardFed: return "guardfed";
  }
  return "?";
}

Aggregator parse_aggregator(std::string_view text) {
  for (auto a : {Aggregator::FedAvg, Aggregator::Median, Aggregator::FLTrust, Aggregator::GuardFed}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError("unknown aggregator '" + std::string(text) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "name", "dataset", "pool_size", "clients_per_round", "rounds", "alpha", "attacker_fraction",
      "attacker_placement", "attack", "noise_sigma", "foe_lambda", "sp_split", "dfa_perf", "aggregator",
      "tau", "gamma", "global_lr", "hidden", "local_epochs", "batch_size", "local_lr", "reference_epochs",
      "reference_batch_size", "reference_lr", "include_sensitive_feature", "test_fraction",
      "root_fraction", "synth_fraction", "server_fraction", "task_threshold", "seed", "record_timing"};
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
  const auto& v = value;
  if (key == "name") {
    cfg.name = v;
  } else if (key == "dataset") {
    std::filesystem::path p(v);
    cfg.dataset = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  } else if (key == "pool_size") {
    cfg.pool_size = to_uint(key, v);
  } else if (key == "clients_per_round") {
    cfg.clients_per_round = to_uint(key, v);
  } else if (key == "rounds") {
    cfg.rounds = to_uint(key, v);
  } else if (key == "alpha") {
    cfg.alpha = to_double(key, v);
  } else if (key == "attacker_fraction") {
    cfg.attacker_fraction = to_double(key, v);
  } else if (key == "attacker_placement") {
    if (v == "pool") {
      cfg.exact_attackers_per_round = false;
    } else if (v == "exact_per_round") {
      cfg.exact_attackers_per_round = true;
    } else {
      throw ConfigError(key + ": expected pool or exact_per_round");
    }
  } else if (key == "attack") {
    cfg.adversary.kind = parse_attack_kind(v);
  } else if (key == "noise_sigma") {
    cfg.adversary.sigma = to_double(key, v);
  } else if (key == "foe_lambda") {
    cfg.adversary.foe_lambda = to_double(key, v);
  } else if (key == "sp_split") {
    cfg.adversary.split_ratio = to_double(key, v);
  } else if (key == "dfa_perf") {
    cfg.adversary.dfa_perf = parse_perf_mode(v);
  } else if (key == "aggregator") {
    cfg.aggregator = parse_aggregator(v);
  } else if (key == "tau") {
    cfg.tau = to_double(key, v);
  } else if (key == "gamma") {
    cfg.gamma = to_double(key, v);
  } else if (key == "global_lr") {
    cfg.global_lr = to_double(key, v);
  } else if (key == "hidden") {
    cfg.hidden.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) cfg.hidden.push_back(static_cast<Eigen::Index>(to_uint(key, item)));
    }
  } else if (key == "local_epochs") {
    cfg.train.epochs = static_cast<int>(to_uint(key, v));
  } else if (key == "batch_size") {
    cfg.train.batch_size = to_uint(key, v);
  } else if (key == "local_lr") {
    cfg.train.learning_rate = to_double(key, v);
  } else if (key == "reference_epochs") {
    cfg.reference_epochs = static_cast<int>(to_uint(key, v));
  } else if (key == "reference_batch_size") {
    cfg.reference_batch_size = to_uint(key, v);
  } else if (key == "reference_lr") {
    cfg.reference_lr = to_double(key, v);
  } else if (key == "include_sensitive_feature") {
    cfg.include_sensitive_feature = to_bool(key, v);
  } else if (key == "test_fraction") {
    cfg.test_fraction = to_double(key, v);
  } else if (key == "root_fraction") {
    cfg.root_fraction = to_double(key, v);
  } else if (key == "synth_fraction") {
    cfg.synth_fraction = to_double(key, v);
  } else if (key == "server_fraction") {
    const double total = to_double(key, v);
    if (total < cfg.root_fraction) {
      throw ConfigError(key + ": total server fraction is below root_fraction");
    }
    cfg.synth_fraction = total - cfg.root_fraction;
  } else if (key == "task_threshold") {
    cfg.task_threshold = to_double(key, v);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, v);
  } else if (key == "record_timing") {
    cfg.record_timing = to_bool(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void ExperimentConfig::validate() {
  auto in_unit = [](double x) { return x >= 0.0 && x < 1.0; };
  if (pool_size < 1) throw ConfigError("pool_size must be >= 1");
  if (clients_per_round < 1 || clients_per_round > pool_size) {
    throw ConfigError("clients_per_round must be in [1, pool_size]");
  }
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!in_unit(attacker_fraction)) throw ConfigError("attacker_fraction must be in [0, 1)");
  if (attacker_fraction > 0.5) {
    warnings.push_back("attacker_fraction " + std::to_string(attacker_fraction) +
                       " exceeds 0.5; honest majority is not guaranteed");
  }
  adversary.validate();
  if (!(tau >= 0.0)) throw ConfigError("tau must be >= 0");
  if (!(global_lr > 0.0)) throw ConfigError("global_lr must be positive");
  for (auto h : hidden) {
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  }
  try {
    train.validate();
    reference_train().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must be in (0, 1)");
  if (!(root_fraction > 0.0 && root_fraction < 1.0)) throw ConfigError("root_fraction must be in (0, 1)");
  if (!in_unit(synth_fraction)) throw ConfigError("synth_fraction must be in [0, 1)");
  if (task_threshold && !(*task_threshold >= 0.0 && *task_threshold <= 1.0)) {
    throw ConfigError("task_threshold must be in [0, 1]");
  }
}

ExperimentConfig validate_config(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_setting(cfg, key, value, base_dir);
    } catch (const std::exception& e) {
      throw ConfigError(where + e.what());
    }
  }
  cfg.validate();
  for (const auto& w : cfg.warnings) std::clog << "[warn] " << w << '\n';
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = validate_config(buf.str(), path.parent_path());
  if (cfg.name == "experiment") cfg.name = path.stem().string();
  return cfg;
}

}  // namespace guardfed
