#include "guardfed/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "guardfed/results.hpp"

namespace guardfed {

namespace {

bool needs_server_data(Aggregator a) { return a == Aggregator::GuardFed || a == Aggregator::FLTrust; }

std::string describe(const std::exception& e, std::size_t round, std::optional<std::size_t> client) {
  std::ostringstream msg;
  msg << "round " << round;
  if (client) msg << ", client " << *client;
  msg << ": " << e.what();
  return msg.str();
}

}  // namespace

Federation prepare_federation(const ExperimentConfig& cfg, bool force_synthetic) {
  Federation fed;
  fed.manifest = load_manifest(cfg.dataset);
  fed.raw = load_dataset(fed.manifest);
  fed.task_threshold = cfg.task_threshold.value_or(fed.manifest.task_threshold);

  const Bits a = fed.raw.sensitive();
  const Bits y = fed.raw.labels();
  auto split = split_train_test(a, y, cfg.test_fraction, seeds::split(cfg.seed));
  fed.train_rows = std::move(split.first);
  fed.test_rows = std::move(split.second);
  auto root = extract_root(fed.train_rows, a, y, cfg.root_fraction, seeds::root(cfg.seed));
  fed.root_rows = std::move(root.first);
  fed.pool_rows = std::move(root.second);

  fed.encoder = Encoder::fit(fed.raw, fed.train_rows, cfg.include_sensitive_feature);
  fed.encoded = fed.encoder.transform(fed.raw);
  fed.test = fed.encoded.subset(fed.test_rows);

  fed.partitions = dirichlet_partition(fed.pool_rows, y, cfg.pool_size, cfg.alpha, seeds::partition(cfg.seed));
  for (const auto& p : fed.partitions) fed.client_data.push_back(fed.encoded.subset(p.rows));

  IndexList ids(cfg.pool_size);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  Rng rng(seeds::malicious(cfg.seed));
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_malicious = static_cast<std::size_t>(
      std::floor(cfg.attacker_fraction * static_cast<double>(cfg.pool_size) + 1e-9));
  if (cfg.adversary.kind != AttackKind::None) {
    fed.malicious.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_malicious));
    std::sort(fed.malicious.begin(), fed.malicious.end());
  }
  fed.roles = assign_roles(fed.malicious, cfg.adversary, seeds::roles(cfg.seed));

  if (needs_server_data(cfg.aggregator) || force_synthetic) {
    fed.synthetic = build_root_plus_synth(fed.raw.subset(fed.root_rows), cfg.synth_fraction,
                                          fed.train_rows.size(), seeds::copula(cfg.seed));
    fed.synthetic_encoded = fed.encoder.transform(fed.synthetic->data);
  }

  fed.dims.push_back(fed.encoder.width());
  fed.dims.insert(fed.dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  fed.dims.push_back(2);
  return fed;
}

std::vector<std::size_t> sample_clients(const ExperimentConfig& cfg, const Federation& fed, std::size_t round) {
  Rng rng(seeds::sampling(cfg.seed, round));
  const std::size_t k = cfg.clients_per_round;
  std::vector<std::size_t> out;
  if (!cfg.exact_attackers_per_round || fed.malicious.empty()) {
    IndexList ids(cfg.pool_size);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    std::sample(ids.begin(), ids.end(), std::back_inserter(out), k, rng);
  } else {
    IndexList honest;
    for (std::size_t c = 0; c < cfg.pool_size; ++c) {
      if (!std::binary_search(fed.malicious.begin(), fed.malicious.end(), c)) honest.push_back(c);
    }
    const auto want = std::min<std::size_t>(
        fed.malicious.size(),
        static_cast<std::size_t>(std::llround(cfg.attacker_fraction * static_cast<double>(k))));
    std::sample(fed.malicious.begin(), fed.malicious.end(), std::back_inserter(out), want, rng);
    std::sample(honest.begin(), honest.end(), std::back_inserter(out), std::min(honest.size(), k - want), rng);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* stream) {
  ExperimentConfig checked = cfg;
  checked.validate();
  const Federation fed = prepare_federation(checked);
  return run_experiment(checked, fed, stream);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Federation& fed, std::ostream* stream,
                                const RunTags& tags) {
  if (stream) write_header(*stream, cfg, fed, tags);

  std::optional<GuardFedState> guard;
  if (cfg.aggregator == Aggregator::GuardFed) {
    GuardFedParams params{cfg.tau, cfg.gamma, cfg.global_lr, cfg.reference_train()};
    guard = GuardFedState::make(*fed.synthetic_encoded, params);
  }

  ExperimentResult result;
  MlpModel global = MlpModel::init(fed.dims, seeds::init(cfg.seed));

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    const auto started = std::chrono::steady_clock::now();
    RoundRecord rec;
    rec.round = t;
    rec.sampled = sample_clients(cfg, fed, t);

    // Local training; the collusion barrier comes after every base update exists.
    std::vector<UpdateVector> updates(rec.sampled.size());
    CollusionContext context;
    for (std::size_t i = 0; i < rec.sampled.size(); ++i) {
      const std::size_t c = rec.sampled[i];
      const Role role = fed.role_of(c);
      TrainConfig tc = cfg.train;
      tc.seed = seeds::train(cfg.seed, t, c);
      try {
        const auto& data = fed.client_data[c];
        const MlpModel local = trains_on_flipped(role) ? train_local(global, flip_sensitive(data), tc)
                                                       : train_local(global, data, tc);
        updates[i] = compute_update(local, global);
      } catch (const std::exception& e) {
        throw std::runtime_error(describe(e, t, c));
      }
      updates[i].client = c;
      updates[i].round = t;
      if (role == Role::Honest) context.benign.push_back(updates[i].delta);
      if (role == Role::Dual) context.dual_poisoned.push_back(updates[i].delta);
    }
    for (std::size_t i = 0; i < rec.sampled.size(); ++i) {
      const std::size_t c = rec.sampled[i];
      const Role role = fed.role_of(c);
      if (role == Role::Honest) continue;
      updates[i].delta = perturb_update(role, updates[i].delta, context, cfg.adversary, seeds::noise(cfg.seed, t, c));
      rec.attacks.push_back({c, role, updates[i].delta.norm()});
    }

    try {
      switch (cfg.aggregator) {
        case Aggregator::FedAvg: {
          std::vector<std::size_t> sizes;
          for (auto c : rec.sampled) sizes.push_back(fed.partitions[c].size());
          global = fedavg(global, updates, sizes, cfg.global_lr);
          break;
        }
        case Aggregator::Median:
          global = median_aggregate(global, updates, cfg.global_lr);
          break;
        case Aggregator::FLTrust: {
          TrainConfig tc = cfg.reference_train();
          tc.seed = seeds::reference(cfg.seed, t);
          const MlpModel server = train_local(global, *fed.synthetic_encoded, tc);
          global = fltrust_baseline(global, updates, compute_update(server, global).delta, cfg.global_lr);
          break;
        }
        case Aggregator::GuardFed: {
          auto out = guardfed_round(*guard, global, updates, t, seeds::reference(cfg.seed, t));
          global = std::move(out.model);
          rec.skipped = out.report.empty_selection;
          rec.trust = std::move(out.report);
          break;
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(describe(e, t, std::nullopt));
    }

    rec.eval = evaluate(global, fed.test, fed.task_threshold);
    if (cfg.record_timing) {
      rec.duration_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    }
    if (stream) write_round(*stream, rec);
    result.rounds.push_back(std::move(rec));
  }
  if (stream) write_summary(*stream, result.rounds);
  result.final_model = std::move(global);
  return result;
}

std::vector<SweepRun> sweep(const ExperimentConfig& base, const std::string& param,
                            const std::vector<std::string>& values, std::size_t n_seeds,
                            const std::filesystem::path& out_dir) {
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), param) == keys.end()) {
    throw ConfigError("sweep: unknown parameter '" + param + "'");
  }
  if (n_seeds < 1) throw ConfigError("sweep: need at least one seed");
  std::filesystem::create_directories(out_dir);
  std::vector<SweepRun> runs;
  for (const auto& value : values) {
    for (std::size_t k = 0; k < n_seeds; ++k) {
      ExperimentConfig cfg = base;
      apply_setting(cfg, param, value);
      cfg.seed = n_seeds == 1 ? base.seed : derive_seed(base.seed, "sweep-seed", {k});
      cfg.warnings.clear();
      cfg.validate();
      SweepRun run;
      run.value = value;
      run.seed = cfg.seed;
      run.results = out_dir / (cfg.name + "__" + param + "=" + value + "__seed" + std::to_string(k) + ".jsonl");
      std::ofstream out(run.results);
      if (!out) throw std::runtime_error("cannot write " + run.results.string());
      const Federation fed = prepare_federation(cfg);
      run.result = run_experiment(cfg, fed, &out,
                                  {{"sweep_param", param}, {"sweep_value", value},
                                   {"sweep_seed_index", std::to_string(k)}});
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

}  // namespace guardfed
