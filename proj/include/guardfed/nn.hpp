#ifndef GUARDFED_NN_HPP
#define GUARDFED_NN_HPP

#include <iosfwd>
#include <optional>
#include <vector>

#include "guardfed/core.hpp"
#include "guardfed/dataset.hpp"

namespace guardfed {

/// ReLU MLP with a two-way softmax head. Parameters live in one flat vector,
/// layer by layer: the weight matrix (out x in, row-major) then the bias.
class MlpModel {
 public:
  MlpModel() = default;

  /// Xavier-uniform weights, zero biases.
  static MlpModel init(std::vector<Eigen::Index> dims, std::uint64_t seed);
  static MlpModel from_parameters(std::vector<Eigen::Index> dims, Vector params);

  const std::vector<Eigen::Index>& dims() const { return dims_; }
  Eigen::Index input_dim() const { return dims_.front(); }
  Eigen::Index parameter_count() const { return params_.size(); }
  std::size_t layers() const { return dims_.size() - 1; }

  const Vector& parameters() const { return params_; }
  Vector& parameters() { return params_; }

  Eigen::Map<const RowMatrix> weight(std::size_t layer) const;
  Eigen::Map<const Vector> bias(std::size_t layer) const;

  /// Row-wise class probabilities, n x 2.
  Matrix forward(const Eigen::Ref<const Matrix>& x) const;
  /// argmax with ties to class 0.
  Bits predict(const Eigen::Ref<const Matrix>& x) const;

  bool same_architecture(const MlpModel& other) const { return dims_ == other.dims_; }

  void save(std::ostream& out) const;
  static MlpModel load(std::istream& in);

 private:
  std::vector<Eigen::Index> dims_;
  std::vector<Eigen::Index> offsets_;  // start of each layer's weights
  Vector params_;

  void layout();
};

/// g = M_new - M_base, tagged with its producer.
struct UpdateVector {
  Vector delta;
  std::size_t client = 0;
  std::size_t round = 0;
};

struct TrainConfig {
  int epochs = 1;
  std::size_t batch_size = 64;
  double learning_rate = 0.005;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LossGradient {
  double loss = 0.0;  // sum_i w_i * -log p(y_i | x_i)
  Vector gradient;    // d loss / d params, same flat layout
};

/// Sum (not mean) of per-row weighted cross-entropy and its gradient, so a row
/// of weight k contributes exactly like k copies of the row.
LossGradient loss_and_gradient(const MlpModel& model, const Eigen::Ref<const Matrix>& x,
                               const Bits& labels, const Vector* weights = nullptr);

inline Vector gradient(const MlpModel& model, const Eigen::Ref<const Matrix>& x, const Bits& labels,
                       const Vector* weights = nullptr) {
  return loss_and_gradient(model, x, labels, weights).gradient;
}

double loss(const MlpModel& model, const Eigen::Ref<const Matrix>& x, const Bits& labels,
            const Vector* weights = nullptr);

/// Mini-batch SGD: each step moves by -lr * (batch gradient sum) / (batch rows).
/// Rows are reshuffled every epoch from cfg.seed. `start` is left unchanged.
MlpModel train_local(const MlpModel& start, const EncodedDataset& data, const TrainConfig& cfg,
                     const Vector* sample_weights = nullptr);

UpdateVector compute_update(const MlpModel& updated, const MlpModel& base);
MlpModel apply_update(const MlpModel& base, const Vector& delta, double eta);
inline MlpModel apply_update(const MlpModel& base, const UpdateVector& g, double eta) {
  return apply_update(base, g.delta, eta);
}

}  // namespace guardfed

#endif  // GUARDFED_NN_HPP
