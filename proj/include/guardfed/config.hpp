#ifndef GUARDFED_CONFIG_HPP
#define GUARDFED_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guardfed/aggregation.hpp"
#include "guardfed/attacks.hpp"
#include "guardfed/nn.hpp"

namespace guardfed {

enum class Aggregator { FedAvg, Median, FLTrust, GuardFed };

std::string_view to_string(Aggregator a);
Aggregator parse_aggregator(std::string_view text);

/// Every knob of one simulated federation. Field defaults are the documented
/// artifact defaults; see configs/ for the grammar.
struct ExperimentConfig {
  std::string name = "experiment";
  std::filesystem::path dataset;  // manifest

  std::size_t pool_size = 100;
  std::size_t clients_per_round = 20;
  std::size_t rounds = 100;
  double alpha = 5000.0;

  double attacker_fraction = 0.2;
  bool exact_attackers_per_round = false;
  AdversarySpec adversary;

  Aggregator aggregator = Aggregator::GuardFed;
  double tau = 2.0;
  double gamma = 0.1;
  double global_lr = 1.0;

  std::vector<Eigen::Index> hidden{64};
  TrainConfig train;
  // Reference-model training; unset fields follow `train`.
  std::optional<int> reference_epochs;
  std::optional<std::size_t> reference_batch_size;
  std::optional<double> reference_lr;
  bool include_sensitive_feature = true;

  double test_fraction = 0.2;
  double root_fraction = 0.01;
  double synth_fraction = 0.04;
  std::optional<double> task_threshold;  // overrides the manifest's

  std::uint64_t seed = 1;
  bool record_timing = false;

  std::vector<std::string> warnings;

  TrainConfig reference_train() const {
    TrainConfig t = train;
    if (reference_epochs) t.epochs = *reference_epochs;
    if (reference_batch_size) t.batch_size = *reference_batch_size;
    if (reference_lr) t.learning_rate = *reference_lr;
    return t;
  }

  /// Range checks shared by the parser and programmatic construction.
  void validate();
};

/// Parse `key = value` text. Unknown keys and out-of-range values raise
/// ConfigError naming the line. Relative dataset paths resolve against `base_dir`.
ExperimentConfig validate_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Apply one `key = value` setting (also used by sweeps). `server_fraction`
/// is a derived key: root_fraction stays, synth_fraction = value - root_fraction.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir = {});

/// Names accepted by apply_setting.
const std::vector<std::string>& config_keys();

}  // namespace guardfed

#endif  // GUARDFED_CONFIG_HPP
