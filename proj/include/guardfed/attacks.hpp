#ifndef GUARDFED_ATTACKS_HPP
#define GUARDFED_ATTACKS_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "guardfed/core.hpp"
#include "guardfed/dataset.hpp"
#include "guardfed/nn.hpp"

namespace guardfed {

enum class AttackKind { None, FlipFair, GaussPerf, FoePerf, SDfa, SpDfa };

/// Which performance attack the dual-facet variants use.
enum class PerfMode { Gaussian, Foe };

enum class Role { Honest, Fairness, Performance, Dual };

struct AdversarySpec {
  AttackKind kind = AttackKind::None;
  double sigma = 0.5;
  double foe_lambda = 1.1;
  double split_ratio = 0.5;  // Sp-DFA share of the fairness subgroup
  PerfMode dfa_perf = PerfMode::Foe;

  void validate() const;
  /// Performance attack actually used by clients in the Performance or Dual role.
  PerfMode perf_mode() const;
};

std::string_view to_string(AttackKind kind);
std::string_view to_string(Role role);
std::string_view to_string(PerfMode mode);
AttackKind parse_attack_kind(std::string_view text);
PerfMode parse_perf_mode(std::string_view text);

using RoleAssignment = std::map<std::size_t, Role>;

/// a <- 1 - a on every row, including the sensitive input feature if present.
EncodedDataset flip_sensitive(const EncodedDataset& data);

/// g + delta with delta ~ N(0, sigma^2 I).
Vector inject_noise(const Vector& g, double sigma, std::uint64_t seed);

/// lambda times the coordinate-wise mean of `updates`.
Vector foe_update(const std::vector<Vector>& updates, double lambda);

/// S-DFA: everyone Dual. Sp-DFA: round(ratio * n) (halves rounded up) ids, chosen
/// by seeded shuffle, become Fairness; the rest Performance. Single-facet
/// kinds give every id the matching single role.
RoleAssignment assign_roles(const IndexList& malicious, const AdversarySpec& spec, std::uint64_t seed);

/// Updates the colluding adversaries can see in a round.
struct CollusionContext {
  std::vector<Vector> benign;         // honest clients' updates
  std::vector<Vector> dual_poisoned;  // flipped-data updates of Dual clients
};

/// Whether a role trains on flipped data.
inline bool trains_on_flipped(Role role) { return role == Role::Fairness || role == Role::Dual; }

/// Output perturbation applied to a client's trained update `g`:
///   Fairness      -> g
///   Performance   -> g + noise, or FOE over the benign updates
///   Dual          -> g + noise, or FOE over the Dual clients' poisoned updates
Vector perturb_update(Role role, const Vector& g, const CollusionContext& context,
                      const AdversarySpec& spec, std::uint64_t noise_seed);

/// Full malicious client step: local training (on flipped data when the role
/// calls for it) followed by perturb_update.
UpdateVector adversarial_update(std::size_t client, Role role, const MlpModel& global,
                                const EncodedDataset& local_data, const CollusionContext& context,
                                const AdversarySpec& spec, const TrainConfig& train,
                                std::uint64_t noise_seed);

}  // namespace guardfed

#endif  // GUARDFED_ATTACKS_HPP
