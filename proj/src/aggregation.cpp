#include "guardfed/aggregation.hpp"

#include <array>
#include <iostream>

#include "guardfed/metrics.hpp"

namespace guardfed {

namespace {

std::vector<Vector> deltas(const std::vector<UpdateVector>& updates) {
  std::vector<Vector> out;
  out.reserve(updates.size());
  for (const auto& u : updates) out.push_back(u.delta);
  return out;
}

void check_updates(const MlpModel& base, const std::vector<UpdateVector>& updates, const char* who) {
  if (updates.empty()) throw std::invalid_argument(std::string(who) + ": no updates");
  for (const auto& u : updates) {
    if (u.delta.size() != base.parameter_count()) {
      throw std::invalid_argument(std::string(who) + ": update from client " + std::to_string(u.client) +
                                  " has wrong length");
    }
    if (!u.delta.allFinite()) {
      throw std::invalid_argument(std::string(who) + ": update from client " + std::to_string(u.client) +
                                  " is not finite");
    }
  }
}

}  // namespace

MlpModel fedavg(const MlpModel& base, const std::vector<UpdateVector>& updates,
                const std::vector<std::size_t>& dataset_sizes, double eta) {
  check_updates(base, updates, "fedavg");
  if (dataset_sizes.size() != updates.size()) throw std::invalid_argument("fedavg: size list mismatch");
  std::vector<double> w(dataset_sizes.begin(), dataset_sizes.end());
  return apply_update(base, weighted_mean(deltas(updates), w), eta);
}

MlpModel median_aggregate(const MlpModel& base, const std::vector<UpdateVector>& updates, double eta) {
  check_updates(base, updates, "median");
  return apply_update(base, coordinate_median(deltas(updates)), eta);
}

MlpModel fltrust_baseline(const MlpModel& base, const std::vector<UpdateVector>& updates,
                          const Vector& server_update, double eta) {
  check_updates(base, updates, "fltrust");
  const double server_norm = server_update.norm();
  if (!(server_norm > 0.0)) throw std::invalid_argument("fltrust: server update is zero");
  Vector sum = Vector::Zero(server_update.size());
  double total = 0.0;
  for (const auto& u : updates) {
    const double norm = u.delta.norm();
    if (!(norm > 0.0)) continue;
    const double w = std::max(0.0, u.delta.dot(server_update) / (norm * server_norm));
    if (w == 0.0) continue;
    sum += w * (server_norm / norm) * u.delta;
    total += w;
  }
  if (total == 0.0) return base;
  return apply_update(base, sum / total, eta);
}

Vector compute_reweights(const Bits& sensitive, const Bits& labels) {
  if (sensitive.size() != labels.size() || labels.empty()) {
    throw std::invalid_argument("compute_reweights: empty or mismatched inputs");
  }
  std::array<double, 4> joint{};
  std::array<double, 2> pa{}, py{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    joint[2 * sensitive[i] + labels[i]] += 1.0;
    pa[sensitive[i]] += 1.0;
    py[labels[i]] += 1.0;
  }
  for (std::size_t c = 0; c < 4; ++c) {
    if (joint[c] == 0.0) {
      throw std::invalid_argument("compute_reweights: (a=" + std::to_string(c / 2) + ", y=" +
                                  std::to_string(c % 2) +
                                  ") cell is empty; sample more synthetic rows");
    }
  }
  const double n = static_cast<double>(labels.size());
  Vector w(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto a = sensitive[i];
    const auto y = labels[i];
    w[static_cast<Eigen::Index>(i)] = (pa[a] / n) * (py[y] / n) / (joint[2 * a + y] / n);
  }
  return w;
}

GuardFedState GuardFedState::make(EncodedDataset synthetic, GuardFedParams params) {
  if (!(params.tau >= 0.0)) throw ConfigError("tau must be >= 0");
  params.reference_train.validate();
  GuardFedState s;
  s.weights = compute_reweights(synthetic.sensitive, synthetic.labels);
  s.synthetic = std::move(synthetic);
  s.params = params;
  return s;
}

std::size_t TrustReport::selected_count() const {
  std::size_t n = 0;
  for (const auto& c : clients) n += c.selected;
  return n;
}

MlpModel train_reference(const GuardFedState& state, const MlpModel& global, std::uint64_t seed) {
  TrainConfig cfg = state.params.reference_train;
  cfg.seed = seed;
  return train_local(global, state.synthetic, cfg, &state.weights);
}

Selection select_and_aggregate(const MlpModel& base, const std::vector<UpdateVector>& updates,
                               const std::vector<double>& trust, double gamma, double eta) {
  check_updates(base, updates, "guardfed");
  if (trust.size() != updates.size()) throw std::invalid_argument("trust list mismatch");
  Selection out{base, std::vector<bool>(updates.size(), false), false};
  Vector sum = Vector::Zero(base.parameter_count());
  std::size_t count = 0;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (trust[i] > gamma) {
      out.selected[i] = true;
      sum += updates[i].delta;
      ++count;
    }
  }
  if (count == 0) {
    out.empty = true;
    return out;
  }
  out.model = apply_update(base, sum / static_cast<double>(count), eta);
  return out;
}

TrustReport score_clients(const GuardFedState& state, const MlpModel& base,
                          const std::vector<UpdateVector>& updates, const Vector& reference_update) {
  TrustReport report;
  for (const auto& u : updates) {
    ClientTrust ct;
    ct.client = u.client;
    const MlpModel client_model = apply_update(base, u.delta, 1.0);
    try {
      ct.fair = fairness_index(client_model, state.synthetic);
    } catch (const UndefinedMetric& e) {
      ct.fair = 1.0;
      ct.fair_undefined = true;
      std::clog << "[warn] client " << u.client << ": " << e.what() << "; fairness index set to 1\n";
    }
    ct.dev = deviation_index(u.delta, reference_update);
    ct.trust = trust_score(ct.dev, ct.fair, state.params.tau);
    report.clients.push_back(ct);
  }
  return report;
}

GuardFedRoundResult guardfed_round(const GuardFedState& state, const MlpModel& base,
                                   const std::vector<UpdateVector>& updates, std::size_t round,
                                   std::uint64_t reference_seed) {
  check_updates(base, updates, "guardfed");
  const MlpModel reference = train_reference(state, base, reference_seed);
  Vector g_s = compute_update(reference, base).delta;
  if (!(g_s.norm() > 0.0)) throw TrainingError("reference update is zero at round " + std::to_string(round));

  GuardFedRoundResult out;
  out.report = score_clients(state, base, updates, g_s);
  out.report.round = round;
  try {
    out.report.reference_fair = fairness_index(reference, state.synthetic);
  } catch (const UndefinedMetric&) {
    out.report.reference_fair = 1.0;
  }
  std::vector<double> trust;
  for (const auto& c : out.report.clients) trust.push_back(c.trust);
  Selection sel = select_and_aggregate(base, updates, trust, state.params.gamma, state.params.eta);
  for (std::size_t i = 0; i < sel.selected.size(); ++i) out.report.clients[i].selected = sel.selected[i];
  out.report.empty_selection = sel.empty;
  out.model = std::move(sel.model);
  out.reference_update = std::move(g_s);
  return out;
}

}  // namespace guardfed
