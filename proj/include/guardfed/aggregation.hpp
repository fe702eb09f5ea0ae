#ifndef GUARDFED_AGGREGATION_HPP
#define GUARDFED_AGGREGATION_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "guardfed/core.hpp"
#include "guardfed/dataset.hpp"
#include "guardfed/nn.hpp"

namespace guardfed {

// ---------------------------------------------------------------------------
// Vector primitives, generic over the scalar type.

/// ReLU-clipped cosine similarity between a client update and the reference
/// update. A zero client update scores 0; a zero reference is an error.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar deviation_index(const Eigen::MatrixBase<DerivedA>& client,
                                          const Eigen::MatrixBase<DerivedB>& reference) {
  using Scalar = typename DerivedA::Scalar;
  if (client.size() != reference.size()) throw std::invalid_argument("deviation_index: length mismatch");
  const Scalar ref_norm = reference.norm();
  if (!(ref_norm > Scalar(0))) throw std::invalid_argument("deviation_index: reference update is zero");
  const Scalar client_norm = client.norm();
  if (!(client_norm > Scalar(0))) return Scalar(0);
  using std::max;
  return max(Scalar(0), client.dot(reference) / (client_norm * ref_norm));
}

/// Trust = dev * exp(-tau * fair).
template <typename Scalar>
Scalar trust_score(Scalar dev, Scalar fair, Scalar tau) {
  using std::exp;
  return dev * exp(-tau * fair);
}

/// Per-coordinate median; an even count averages the two middle values.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coordinate_median(
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& updates) {
  if (updates.empty()) throw std::invalid_argument("coordinate_median: no updates");
  const Eigen::Index p = updates.front().size();
  const std::size_t n = updates.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(p);
  std::vector<Scalar> column(n);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = updates[i][j];
    const auto mid = column.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(column.begin(), mid, column.end());
    if (n % 2 == 1) {
      out[j] = *mid;
    } else {
      const Scalar upper = *mid;
      const Scalar lower = *std::max_element(column.begin(), mid);
      out[j] = (lower + upper) / Scalar(2);
    }
  }
  return out;
}

/// sum_i (w_i / sum_j w_j) g_i.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weighted_mean(
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& updates, const std::vector<Scalar>& weights) {
  if (updates.empty()) throw std::invalid_argument("weighted_mean: no updates");
  if (updates.size() != weights.size()) throw std::invalid_argument("weighted_mean: size mismatch");
  Scalar total(0);
  for (auto w : weights) total += w;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(updates.front().size());
  for (std::size_t i = 0; i < updates.size(); ++i) out += (weights[i] / total) * updates[i];
  return out;
}

// ---------------------------------------------------------------------------
// Baseline aggregators

/// M + eta * sum_n (|D_n| / sum_j |D_j|) g_n.
MlpModel fedavg(const MlpModel& base, const std::vector<UpdateVector>& updates,
                const std::vector<std::size_t>& dataset_sizes, double eta);

MlpModel median_aggregate(const MlpModel& base, const std::vector<UpdateVector>& updates, double eta);

/// Each g_n rescaled to |g_s| and weighted by ReLU(cos(g_n, g_s)); all-zero
/// weights leave the model unchanged.
MlpModel fltrust_baseline(const MlpModel& base, const std::vector<UpdateVector>& updates,
                          const Vector& server_update, double eta);

// ---------------------------------------------------------------------------
// GuardFed

/// w_i = P(a_i) P(y_i) / P(a_i, y_i) from empirical counts. Throws when a
/// (a, y) cell is empty.
Vector compute_reweights(const Bits& sensitive, const Bits& labels);

struct GuardFedParams {
  double tau = 2.0;
  double gamma = 0.1;
  double eta = 1.0;
  TrainConfig reference_train;
};

struct GuardFedState {
  EncodedDataset synthetic;
  Vector weights;
  GuardFedParams params;

  static GuardFedState make(EncodedDataset synthetic, GuardFedParams params);
};

struct ClientTrust {
  std::size_t client = 0;
  double fair = 0.0;
  double dev = 0.0;
  double trust = 0.0;
  bool selected = false;
  bool fair_undefined = false;  // metric undefined, fair forced to 1
};

struct TrustReport {
  std::size_t round = 0;
  std::vector<ClientTrust> clients;
  bool empty_selection = false;
  double reference_fair = 0.0;

  std::size_t selected_count() const;
};

/// Reweighted training of the reference model, starting at the current global model.
MlpModel train_reference(const GuardFedState& state, const MlpModel& global, std::uint64_t seed);

/// Clients with trust > gamma, averaged without size weighting. An empty
/// selection keeps the base model.
struct Selection {
  MlpModel model;
  std::vector<bool> selected;
  bool empty = false;
};
Selection select_and_aggregate(const MlpModel& base, const std::vector<UpdateVector>& updates,
                               const std::vector<double>& trust, double gamma, double eta);

struct GuardFedRoundResult {
  MlpModel model;
  TrustReport report;
  Vector reference_update;
};

GuardFedRoundResult guardfed_round(const GuardFedState& state, const MlpModel& base,
                                   const std::vector<UpdateVector>& updates, std::size_t round,
                                   std::uint64_t reference_seed);

/// Scoring half of a GuardFed round against a given reference update.
TrustReport score_clients(const GuardFedState& state, const MlpModel& base,
                          const std::vector<UpdateVector>& updates, const Vector& reference_update);

}  // namespace guardfed

#endif  // GUARDFED_AGGREGATION_HPP
