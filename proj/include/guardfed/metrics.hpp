#ifndef GUARDFED_METRICS_HPP
#define GUARDFED_METRICS_HPP

#include <array>
#include <optional>
#include <string>

#include "guardfed/core.hpp"
#include "guardfed/dataset.hpp"
#include "guardfed/nn.hpp"

namespace guardfed {

/// Per sensitive group counts; index 0 and 1 are the values of a.
struct GroupConfusion {
  std::array<std::size_t, 2> total{};
  std::array<std::size_t, 2> predicted_positive{};
  std::array<std::size_t, 2> positives{};
  std::array<std::size_t, 2> true_positives{};

  static GroupConfusion count(const Bits& predictions, const Bits& sensitive, const Bits& labels);

  /// |P(yhat=1 | a=0) - P(yhat=1 | a=1)|; throws UndefinedMetric if a group is empty.
  double aspd() const;
  /// |TPR(a=0) - TPR(a=1)|; throws UndefinedMetric if a group has no positives.
  double aeod() const;
};

double accuracy(const Bits& predictions, const Bits& labels);
double accuracy(const MlpModel& model, const EncodedDataset& data);
double aspd(const MlpModel& model, const EncodedDataset& data);
double aeod(const MlpModel& model, const EncodedDataset& data);

/// Equal-opportunity gap of a client model on the server's synthetic data.
inline double fairness_index(const MlpModel& model, const EncodedDataset& synthetic) {
  return aeod(model, synthetic);
}

struct EvalReport {
  double accuracy = 0.0;
  std::optional<double> aspd;  // empty when undefined
  std::optional<double> aeod;
  bool fairness_valid = false;  // accuracy >= threshold
  double threshold = 0.0;
  std::string undefined_reason;
};

EvalReport evaluate(const MlpModel& model, const EncodedDataset& test, double task_threshold);
EvalReport evaluate(const Bits& predictions, const Bits& sensitive, const Bits& labels,
                    double task_threshold);

}  // namespace guardfed

#endif  // GUARDFED_METRICS_HPP
