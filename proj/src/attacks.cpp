#include "guardfed/attacks.hpp"

#include <algorithm>
#include <cmath>

namespace guardfed {

void AdversarySpec::validate() const {
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (!(foe_lambda != 0.0) || !std::isfinite(foe_lambda)) throw ConfigError("FOE lambda must be finite and nonzero");
  if (!(split_ratio >= 0.0 && split_ratio <= 1.0)) throw ConfigError("Sp-DFA split ratio must be in [0, 1]");
}

PerfMode AdversarySpec::perf_mode() const {
  switch (kind) {
    case AttackKind::GaussPerf: return PerfMode::Gaussian;
    case AttackKind::FoePerf: return PerfMode::Foe;
    default: return dfa_perf;
  }
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::FlipFair: return "flip_fair";
    case AttackKind::GaussPerf: return "gauss_perf";
    case AttackKind::FoePerf: return "foe_perf";
    case AttackKind::SDfa: return "s_dfa";
    case AttackKind::SpDfa: return "sp_dfa";
  }
  return "?";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Honest: return "honest";
    case Role::Fairness: return "fairness";
    case Role::Performance: return "performance";
    case Role::Dual: return "dual";
  }
  return "?";
}

std::string_view to_string(PerfMode mode) { return mode == PerfMode::Foe ? "foe" : "gaussian"; }

AttackKind parse_attack_kind(std::string_view text) {
  for (auto k : {AttackKind::None, AttackKind::FlipFair, AttackKind::GaussPerf, AttackKind::FoePerf,
                 AttackKind::SDfa, AttackKind::SpDfa}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown attack kind '" + std::string(text) + "'");
}

PerfMode parse_perf_mode(std::string_view text) {
  if (text == "foe") return PerfMode::Foe;
  if (text == "gaussian") return PerfMode::Gaussian;
  throw ConfigError("unknown performance attack '" + std::string(text) + "'");
}

EncodedDataset flip_sensitive(const EncodedDataset& data) {
  EncodedDataset out = data;
  for (auto& a : out.sensitive) a = static_cast<std::uint8_t>(1 - a);
  if (out.sensitive_feature) {
    for (Eigen::Index i = 0; i < out.features.rows(); ++i) {
      out.features(i, *out.sensitive_feature) = out.sensitive[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

Vector inject_noise(const Vector& g, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0) return g;
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  Vector out = g;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += normal(rng);
  return out;
}

Vector foe_update(const std::vector<Vector>& updates, double lambda) {
  if (updates.empty()) throw std::invalid_argument("FOE needs at least one visible update");
  Vector mean = Vector::Zero(updates.front().size());
  for (const auto& u : updates) {
    if (u.size() != mean.size()) throw std::invalid_argument("FOE updates differ in length");
    mean += u;
  }
  mean /= static_cast<double>(updates.size());
  return lambda * mean;
}

RoleAssignment assign_roles(const IndexList& malicious, const AdversarySpec& spec, std::uint64_t seed) {
  RoleAssignment roles;
  switch (spec.kind) {
    case AttackKind::None:
      break;
    case AttackKind::FlipFair:
      for (auto id : malicious) roles[id] = Role::Fairness;
      break;
    case AttackKind::GaussPerf:
    case AttackKind::FoePerf:
      for (auto id : malicious) roles[id] = Role::Performance;
      break;
    case AttackKind::SDfa:
      for (auto id : malicious) roles[id] = Role::Dual;
      break;
    case AttackKind::SpDfa: {
      IndexList ids = malicious;
      std::sort(ids.begin(), ids.end());
      Rng rng(seed);
      std::shuffle(ids.begin(), ids.end(), rng);
      const auto n_fair = static_cast<std::size_t>(
          std::floor(spec.split_ratio * static_cast<double>(ids.size()) + 0.5));
      for (std::size_t i = 0; i < ids.size(); ++i) {
        roles[ids[i]] = i < n_fair ? Role::Fairness : Role::Performance;
      }
      break;
    }
  }
  return roles;
}

Vector perturb_update(Role role, const Vector& g, const CollusionContext& context,
                      const AdversarySpec& spec, std::uint64_t noise_seed) {
  switch (role) {
    case Role::Honest:
    case Role::Fairness:
      return g;
    case Role::Performance:
      if (spec.perf_mode() == PerfMode::Gaussian) return inject_noise(g, spec.sigma, noise_seed);
      return foe_update(context.benign.empty() ? std::vector<Vector>{g} : context.benign, spec.foe_lambda);
    case Role::Dual:
      if (spec.perf_mode() == PerfMode::Gaussian) return inject_noise(g, spec.sigma, noise_seed);
      return foe_update(context.dual_poisoned.empty() ? std::vector<Vector>{g} : context.dual_poisoned,
                        spec.foe_lambda);
  }
  return g;
}

UpdateVector adversarial_update(std::size_t client, Role role, const MlpModel& global,
                                const EncodedDataset& local_data, const CollusionContext& context,
                                const AdversarySpec& spec, const TrainConfig& train,
                                std::uint64_t noise_seed) {
  const MlpModel local = trains_on_flipped(role) ? train_local(global, flip_sensitive(local_data), train)
                                                 : train_local(global, local_data, train);
  UpdateVector g = compute_update(local, global);
  g.delta = perturb_update(role, g.delta, context, spec, noise_seed);
  g.client = client;
  return g;
}

}  // namespace guardfed
