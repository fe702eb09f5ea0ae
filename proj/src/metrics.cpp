#include "guardfed/metrics.hpp"

#include <cmath>

namespace guardfed {

GroupConfusion GroupConfusion::count(const Bits& predictions, const Bits& sensitive, const Bits& labels) {
  if (predictions.size() != sensitive.size() || predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction, sensitive, and label lengths differ");
  }
  GroupConfusion c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const std::size_t a = sensitive[i];
    ++c.total[a];
    c.predicted_positive[a] += predictions[i];
    if (labels[i]) {
      ++c.positives[a];
      c.true_positives[a] += predictions[i];
    }
  }
  return c;
}

double GroupConfusion::aspd() const {
  if (total[0] == 0 || total[1] == 0) {
    throw UndefinedMetric("ASPD undefined: sensitive group " + std::string(total[0] ? "1" : "0") +
                          " is empty");
  }
  const double r0 = static_cast<double>(predicted_positive[0]) / static_cast<double>(total[0]);
  const double r1 = static_cast<double>(predicted_positive[1]) / static_cast<double>(total[1]);
  return std::abs(r0 - r1);
}

double GroupConfusion::aeod() const {
  if (positives[0] == 0 || positives[1] == 0) {
    throw UndefinedMetric("AEOD undefined: sensitive group " + std::string(positives[0] ? "1" : "0") +
                          " has no positive labels");
  }
  const double t0 = static_cast<double>(true_positives[0]) / static_cast<double>(positives[0]);
  const double t1 = static_cast<double>(true_positives[1]) / static_cast<double>(positives[1]);
  return std::abs(t0 - t1);
}

double accuracy(const Bits& predictions, const Bits& labels) {
  if (predictions.empty()) throw std::invalid_argument("accuracy of an empty dataset");
  if (predictions.size() != labels.size()) throw std::invalid_argument("prediction/label length mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double accuracy(const MlpModel& model, const EncodedDataset& data) {
  return accuracy(model.predict(data.features), data.labels);
}

double aspd(const MlpModel& model, const EncodedDataset& data) {
  return GroupConfusion::count(model.predict(data.features), data.sensitive, data.labels).aspd();
}

double aeod(const MlpModel& model, const EncodedDataset& data) {
  return GroupConfusion::count(model.predict(data.features), data.sensitive, data.labels).aeod();
}

EvalReport evaluate(const Bits& predictions, const Bits& sensitive, const Bits& labels,
                    double task_threshold) {
  EvalReport r;
  r.threshold = task_threshold;
  r.accuracy = accuracy(predictions, labels);
  r.fairness_valid = r.accuracy >= task_threshold;
  const auto c = GroupConfusion::count(predictions, sensitive, labels);
  try {
    r.aspd = c.aspd();
  } catch (const UndefinedMetric& e) {
    r.undefined_reason = e.what();
  }
  try {
    r.aeod = c.aeod();
  } catch (const UndefinedMetric& e) {
    r.undefined_reason += (r.undefined_reason.empty() ? "" : "; ") + std::string(e.what());
  }
  return r;
}

EvalReport evaluate(const MlpModel& model, const EncodedDataset& test, double task_threshold) {
  return evaluate(model.predict(test.features), test.sensitive, test.labels, task_threshold);
}

}  // namespace guardfed
