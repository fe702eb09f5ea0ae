#ifndef GUARDFED_EXPERIMENT_HPP
#define GUARDFED_EXPERIMENT_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "guardfed/aggregation.hpp"
#include "guardfed/attacks.hpp"
#include "guardfed/config.hpp"
#include "guardfed/copula.hpp"
#include "guardfed/dataset.hpp"
#include "guardfed/metrics.hpp"
#include "guardfed/nn.hpp"

namespace guardfed {

/// Named seed streams, all derived from the master seed.
namespace seeds {
inline std::uint64_t split(std::uint64_t m) { return derive_seed(m, "split"); }
inline std::uint64_t root(std::uint64_t m) { return derive_seed(m, "root"); }
inline std::uint64_t copula(std::uint64_t m) { return derive_seed(m, "copula"); }
inline std::uint64_t partition(std::uint64_t m) { return derive_seed(m, "partition"); }
inline std::uint64_t malicious(std::uint64_t m) { return derive_seed(m, "malicious"); }
inline std::uint64_t roles(std::uint64_t m) { return derive_seed(m, "roles"); }
inline std::uint64_t init(std::uint64_t m) { return derive_seed(m, "init"); }
inline std::uint64_t sampling(std::uint64_t m, std::size_t round) { return derive_seed(m, "sample", {round}); }
inline std::uint64_t train(std::uint64_t m, std::size_t round, std::size_t client) {
  return derive_seed(m, "train", {round, client});
}
inline std::uint64_t noise(std::uint64_t m, std::size_t round, std::size_t client) {
  return derive_seed(m, "noise", {round, client});
}
inline std::uint64_t reference(std::uint64_t m, std::size_t round) { return derive_seed(m, "reference", {round}); }
}  // namespace seeds

/// Everything fixed before the first round.
struct Federation {
  DatasetManifest manifest;
  TabularDataset raw;
  Encoder encoder;
  EncodedDataset encoded;  // every row of `raw`
  IndexList train_rows;
  IndexList test_rows;
  IndexList root_rows;
  IndexList pool_rows;
  EncodedDataset test;
  std::vector<ClientPartition> partitions;
  std::vector<EncodedDataset> client_data;
  IndexList malicious;
  RoleAssignment roles;
  std::optional<SyntheticDataset> synthetic;
  std::optional<EncodedDataset> synthetic_encoded;
  double task_threshold = 0.6;
  std::vector<Eigen::Index> dims;

  Role role_of(std::size_t client) const {
    const auto it = roles.find(client);
    return it == roles.end() ? Role::Honest : it->second;
  }
};

/// Load, split, encode, partition, place attackers, and (for server-data
/// aggregators or when `force_synthetic`) build the root-plus-synthetic set.
Federation prepare_federation(const ExperimentConfig& cfg, bool force_synthetic = false);

struct AttackEvent {
  std::size_t client = 0;
  Role role = Role::Honest;
  double update_norm = 0.0;
};

struct RoundRecord {
  std::size_t round = 0;
  EvalReport eval;
  std::vector<std::size_t> sampled;
  std::vector<AttackEvent> attacks;
  std::optional<TrustReport> trust;
  bool skipped = false;  // empty GuardFed selection
  std::optional<double> duration_ms;
};

struct ExperimentResult {
  std::vector<RoundRecord> rounds;
  MlpModel final_model;
};

/// Run the full federation. When `stream` is given, the header, every round
/// and the closing summary are written to it as JSON lines.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* stream = nullptr);
/// Extra string fields recorded in the header, e.g. sweep tags.
using RunTags = std::vector<std::pair<std::string, std::string>>;
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Federation& fed, std::ostream* stream,
                                const RunTags& tags = {});

/// Clients sampled in a round: uniform without replacement, sorted. With
/// exact placement, round(fraction * k) of them are drawn from the malicious set.
std::vector<std::size_t> sample_clients(const ExperimentConfig& cfg, const Federation& fed, std::size_t round);

struct SweepRun {
  std::string value;
  std::uint64_t seed = 0;
  std::filesystem::path results;
  ExperimentResult result;
};

/// Cross product of `values` and `n_seeds` derived seeds; each run streams to
/// `<out_dir>/<name>__<param>=<value>__seed<k>.jsonl`.
std::vector<SweepRun> sweep(const ExperimentConfig& base, const std::string& param,
                            const std::vector<std::string>& values, std::size_t n_seeds,
                            const std::filesystem::path& out_dir);

}  // namespace guardfed

#endif  // GUARDFED_EXPERIMENT_HPP
