#include "guardfed/nn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace guardfed {

void MlpModel::layout() {
  if (dims_.size() < 2) throw std::invalid_argument("an MLP needs at least input and output dims");
  if (dims_.back() != 2) throw std::invalid_argument("output dim must be 2 (binary softmax)");
  for (auto d : dims_) {
    if (d < 1) throw std::invalid_argument("layer dims must be positive");
  }
  offsets_.clear();
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    offsets_.push_back(offset);
    offset += dims_[l + 1] * dims_[l] + dims_[l + 1];
  }
  offsets_.push_back(offset);
}

MlpModel MlpModel::init(std::vector<Eigen::Index> dims, std::uint64_t seed) {
  MlpModel m;
  m.dims_ = std::move(dims);
  m.layout();
  m.params_ = Vector::Zero(m.offsets_.back());
  Rng rng(seed);
  for (std::size_t l = 0; l < m.layers(); ++l) {
    const double fan_in = static_cast<double>(m.dims_[l]);
    const double fan_out = static_cast<double>(m.dims_[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    const Eigen::Index n = m.dims_[l] * m.dims_[l + 1];
    for (Eigen::Index i = 0; i < n; ++i) m.params_[m.offsets_[l] + i] = u(rng);
  }
  return m;
}

MlpModel MlpModel::from_parameters(std::vector<Eigen::Index> dims, Vector params) {
  MlpModel m;
  m.dims_ = std::move(dims);
  m.layout();
  if (params.size() != m.offsets_.back()) {
    throw std::invalid_argument("parameter vector has length " + std::to_string(params.size()) +
                                ", architecture needs " + std::to_string(m.offsets_.back()));
  }
  m.params_ = std::move(params);
  return m;
}

Eigen::Map<const RowMatrix> MlpModel::weight(std::size_t layer) const {
  return {params_.data() + offsets_[layer], dims_[layer + 1], dims_[layer]};
}

Eigen::Map<const Vector> MlpModel::bias(std::size_t layer) const {
  return {params_.data() + offsets_[layer] + dims_[layer + 1] * dims_[layer], dims_[layer + 1]};
}

namespace {

// Hidden pre-activations and activations for one batch.
struct Trace {
  std::vector<Matrix> pre;   // Z_l
  std::vector<Matrix> post;  // A_l, post[0] = input
  Matrix log_probs;
};

Trace run(const MlpModel& m, const Eigen::Ref<const Matrix>& x) {
  if (x.cols() != m.input_dim()) {
    throw std::invalid_argument("batch width " + std::to_string(x.cols()) + " != input dim " +
                                std::to_string(m.input_dim()));
  }
  if (!x.allFinite()) throw std::invalid_argument("non-finite input to forward pass");
  Trace t;
  t.post.push_back(x);
  for (std::size_t l = 0; l < m.layers(); ++l) {
    Matrix z = t.post.back() * m.weight(l).transpose();
    z.rowwise() += m.bias(l).transpose();
    t.pre.push_back(z);
    if (l + 1 < m.layers()) t.post.push_back(z.cwiseMax(0.0));
  }
  const Matrix& logits = t.pre.back();
  const Vector mx = logits.rowwise().maxCoeff();
  Matrix shifted = logits.colwise() - mx;
  const Vector lse = shifted.array().exp().rowwise().sum().log();
  t.log_probs = shifted.colwise() - lse;
  return t;
}

}  // namespace

Matrix MlpModel::forward(const Eigen::Ref<const Matrix>& x) const {
  return run(*this, x).log_probs.array().exp();
}

Bits MlpModel::predict(const Eigen::Ref<const Matrix>& x) const {
  const Matrix logp = run(*this, x).log_probs;
  Bits out(static_cast<std::size_t>(logp.rows()));
  for (Eigen::Index i = 0; i < logp.rows(); ++i) out[i] = logp(i, 1) > logp(i, 0) ? 1 : 0;
  return out;
}

void MlpModel::save(std::ostream& out) const {
  out << "guardfed-mlp 1\n" << dims_.size();
  for (auto d : dims_) out << ' ' << d;
  out << '\n' << std::hexfloat;
  for (Eigen::Index i = 0; i < params_.size(); ++i) out << params_[i] << '\n';
  out << std::defaultfloat;
}

MlpModel MlpModel::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "guardfed-mlp" || version != 1) throw SchemaError("unsupported model checkpoint");
  std::size_t n = 0;
  in >> n;
  std::vector<Eigen::Index> dims(n);
  for (auto& d : dims) in >> d;
  MlpModel m;
  m.dims_ = dims;
  m.layout();
  m.params_.resize(m.offsets_.back());
  for (Eigen::Index i = 0; i < m.params_.size(); ++i) {
    std::string token;
    in >> token;
    m.params_[i] = std::strtod(token.c_str(), nullptr);
  }
  if (!in) throw SchemaError("truncated model checkpoint");
  return m;
}

LossGradient loss_and_gradient(const MlpModel& model, const Eigen::Ref<const Matrix>& x,
                               const Bits& labels, const Vector* weights) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw std::invalid_argument("label count mismatch");
  if (weights && weights->size() != n) throw std::invalid_argument("weight count mismatch");
  const Trace t = run(model, x);

  LossGradient out;
  out.gradient = Vector::Zero(model.parameter_count());
  Matrix delta = t.log_probs.array().exp();  // P - Y, row-scaled by w
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    out.loss -= w * t.log_probs(i, labels[i]);
    delta(i, labels[i]) -= 1.0;
    delta.row(i) *= w;
  }

  Eigen::Index offset = model.parameter_count();
  for (std::size_t l = model.layers(); l-- > 0;) {
    const Eigen::Index rows = model.dims()[l + 1];
    const Eigen::Index cols = model.dims()[l];
    offset -= rows * cols + rows;
    Eigen::Map<RowMatrix>(out.gradient.data() + offset, rows, cols) = delta.transpose() * t.post[l];
    out.gradient.segment(offset + rows * cols, rows) = delta.colwise().sum().transpose();
    if (l > 0) {
      Matrix back = delta * model.weight(l);
      delta = (t.pre[l - 1].array() > 0.0).select(back, 0.0);
    }
  }
  return out;
}

double loss(const MlpModel& model, const Eigen::Ref<const Matrix>& x, const Bits& labels,
            const Vector* weights) {
  const Trace t = run(model, x);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    total -= (weights ? (*weights)[i] : 1.0) * t.log_probs(i, labels[i]);
  }
  return total;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("local epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
}

MlpModel train_local(const MlpModel& start, const EncodedDataset& data, const TrainConfig& cfg,
                     const Vector* sample_weights) {
  cfg.validate();
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("train_local: empty dataset");
  if (sample_weights) {
    if (static_cast<std::size_t>(sample_weights->size()) != n) {
      throw std::invalid_argument("sample weight count does not match dataset");
    }
    if ((sample_weights->array() <= 0.0).any()) throw std::invalid_argument("sample weights must be positive");
  }

  MlpModel model = start;
  IndexList order(n);
  const Eigen::Index width = data.features.cols();
  Matrix xb;
  Bits yb;
  Vector wb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, "epoch", {static_cast<std::uint64_t>(epoch)}));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      const auto b = static_cast<Eigen::Index>(end - begin);
      xb.resize(b, width);
      yb.resize(static_cast<std::size_t>(b));
      if (sample_weights) wb.resize(b);
      for (Eigen::Index i = 0; i < b; ++i) {
        const std::size_t r = order[begin + static_cast<std::size_t>(i)];
        xb.row(i) = data.features.row(static_cast<Eigen::Index>(r));
        yb[static_cast<std::size_t>(i)] = data.labels[r];
        if (sample_weights) wb[i] = (*sample_weights)[static_cast<Eigen::Index>(r)];
      }
      const LossGradient lg = loss_and_gradient(model, xb, yb, sample_weights ? &wb : nullptr);
      if (!std::isfinite(lg.loss) || !lg.gradient.allFinite()) {
        std::ostringstream msg;
        msg << "training diverged at epoch " << epoch << ", batch starting at " << begin
            << " (batch loss " << lg.loss << ")";
        throw TrainingError(msg.str());
      }
      model.parameters() -= (cfg.learning_rate / static_cast<double>(b)) * lg.gradient;
    }
  }
  return model;
}

UpdateVector compute_update(const MlpModel& updated, const MlpModel& base) {
  if (!updated.same_architecture(base)) throw std::invalid_argument("compute_update: architecture mismatch");
  return UpdateVector{updated.parameters() - base.parameters(), 0, 0};
}

MlpModel apply_update(const MlpModel& base, const Vector& delta, double eta) {
  if (delta.size() != base.parameter_count()) {
    throw std::invalid_argument("apply_update: update length " + std::to_string(delta.size()) +
                                " != parameter count " + std::to_string(base.parameter_count()));
  }
  MlpModel out = base;
  out.parameters() += eta * delta;
  return out;
}

}  // namespace guardfed
