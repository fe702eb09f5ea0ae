#include "guardfed/copula.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "guardfed/normal.hpp"

namespace guardfed {

MarginalCDF MarginalCDF::fit(const Column& column) {
  MarginalCDF m;
  m.kind = column.schema.kind;
  m.rows = column.values.size();
  if (m.rows == 0) throw std::invalid_argument("cannot fit a marginal on an empty column");
  if (m.kind == ColumnKind::Numeric) {
    m.sorted = column.values;
    std::sort(m.sorted.begin(), m.sorted.end());
  } else {
    std::vector<double> counts(std::max<std::size_t>(column.categories.size(), 1), 0.0);
    for (double v : column.values) counts.at(static_cast<std::size_t>(v)) += 1.0;
    m.cumulative.assign(counts.size() + 1, 0.0);
    for (std::size_t k = 0; k < counts.size(); ++k) {
      m.cumulative[k + 1] = m.cumulative[k] + counts[k] / static_cast<double>(m.rows);
    }
    m.cumulative.back() = 1.0;
  }
  return m;
}

double MarginalCDF::cdf(double x) const {
  double u;
  if (kind == ColumnKind::Numeric) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    const auto hi = std::upper_bound(lo, sorted.end(), x);
    const auto less = static_cast<double>(lo - sorted.begin());
    const auto equal = static_cast<double>(hi - lo);
    u = (less + 0.5 * equal) / static_cast<double>(rows);
  } else {
    const auto k = static_cast<std::size_t>(x);
    if (k + 1 >= cumulative.size()) throw std::out_of_range("category code outside marginal");
    u = 0.5 * (cumulative[k] + cumulative[k + 1]);
  }
  return std::clamp(u, clamp_lo(), clamp_hi());
}

double MarginalCDF::inverse(double u) const {
  u = std::clamp(u, clamp_lo(), clamp_hi());
  if (kind == ColumnKind::Numeric) {
    const double pos = std::clamp(u * static_cast<double>(rows) - 0.5, 0.0, static_cast<double>(rows - 1));
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= rows) return sorted.back();
    const double frac = pos - static_cast<double>(i);
    if (frac == 0.0) return sorted[i];
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
  }
  // First non-empty interval [c_k, c_{k+1}) containing u.
  const std::size_t K = cumulative.size() - 1;
  std::size_t last_nonempty = 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (cumulative[k + 1] <= cumulative[k]) continue;
    last_nonempty = k;
    if (u < cumulative[k + 1]) return static_cast<double>(k);
  }
  return static_cast<double>(last_nonempty);
}

CopulaModel CopulaModel::fit(const TabularDataset& root) {
  if (root.rows() < 2) throw std::invalid_argument("copula fit needs at least 2 rows");
  if (root.cols() < 1) throw std::invalid_argument("copula fit needs at least 1 column");
  CopulaModel model;
  model.prototype_ = root.subset({});
  for (const auto& col : root.columns()) model.marginals_.push_back(MarginalCDF::fit(col));

  const auto r = static_cast<Eigen::Index>(root.rows());
  const auto d = static_cast<Eigen::Index>(root.cols());
  Matrix z(r, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& col = root.column(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < r; ++i) {
      z(i, j) = normal_quantile(model.marginals_[j].cdf(col.values[i]));
    }
  }
  const Matrix centered = z.rowwise() - z.colwise().mean();
  model.covariance_ = (centered.transpose() * centered) / static_cast<double>(r - 1);
  model.covariance_.diagonal().array() += kRegularization;
  model.factorize();
  return model;
}

void CopulaModel::factorize() {
  const Vector inv_sd = covariance_.diagonal().cwiseSqrt().cwiseInverse();
  Matrix corr = inv_sd.asDiagonal() * covariance_ * inv_sd.asDiagonal();
  corr = 0.5 * (corr + corr.transpose());
  Eigen::LLT<Matrix> llt(corr);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  // Eigenvalue clipping, then re-normalize to unit diagonal.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr);
  const Vector clipped = eig.eigenvalues().cwiseMax(1e-10);
  Matrix repaired = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  const Vector s = repaired.diagonal().cwiseSqrt().cwiseInverse();
  repaired = s.asDiagonal() * repaired * s.asDiagonal();
  Eigen::LLT<Matrix> retry(0.5 * (repaired + repaired.transpose()));
  if (retry.info() == Eigen::Success) {
    factor_ = retry.matrixL();
  } else {
    factor_ = eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
  }
}

Vector CopulaModel::to_gaussian(std::span<const double> row) const {
  if (row.size() != marginals_.size()) throw std::invalid_argument("row arity does not match copula");
  Vector z(static_cast<Eigen::Index>(row.size()));
  for (std::size_t j = 0; j < row.size(); ++j) {
    z[static_cast<Eigen::Index>(j)] = normal_quantile(marginals_[j].cdf(row[j]));
  }
  return z;
}

std::vector<double> CopulaModel::from_gaussian(const Vector& z) const {
  if (static_cast<std::size_t>(z.size()) != marginals_.size()) {
    throw std::invalid_argument("z arity does not match copula");
  }
  std::vector<double> row(marginals_.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    row[j] = marginals_[j].inverse(normal_cdf(z[static_cast<Eigen::Index>(j)]));
  }
  return row;
}

SyntheticDataset CopulaModel::sample(std::size_t m, std::uint64_t seed) const {
  if (m == 0) throw std::invalid_argument("sample size must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = factor_.rows();
  std::vector<std::vector<double>> rows;
  rows.reserve(m);
  Vector eps(d);
  for (std::size_t i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) eps[j] = normal(rng);
    rows.push_back(from_gaussian(factor_.triangularView<Eigen::Lower>() * eps));
  }
  SyntheticDataset out{prototype_.with_rows(rows), std::vector<bool>(m, true)};
  return out;
}

void CopulaModel::save(std::ostream& out) const {
  out << "guardfed-copula 1\n" << marginals_.size() << '\n';
  out << std::hexfloat;
  for (const auto& m : marginals_) {
    const auto& values = m.kind == ColumnKind::Numeric ? m.sorted : m.cumulative;
    out << (m.kind == ColumnKind::Numeric ? "numeric " : "categorical ") << m.rows << ' '
        << values.size();
    for (double v : values) out << ' ' << v;
    out << '\n';
  }
  for (Eigen::Index i = 0; i < covariance_.rows(); ++i) {
    for (Eigen::Index j = 0; j < covariance_.cols(); ++j) out << (j ? " " : "") << covariance_(i, j);
    out << '\n';
  }
  out << std::defaultfloat;
}

namespace {
double read_double(std::istream& in) {
  std::string token;
  in >> token;
  return std::strtod(token.c_str(), nullptr);  // accepts hexfloat
}
}  // namespace

CopulaModel CopulaModel::load(std::istream& in, const TabularDataset& prototype) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "guardfed-copula" || version != 1) throw SchemaError("unsupported copula file");
  std::size_t d = 0;
  in >> d;
  if (d != prototype.cols()) throw SchemaError("copula file arity does not match schema");
  CopulaModel model;
  model.prototype_ = prototype.subset({});
  for (std::size_t j = 0; j < d; ++j) {
    std::string kind;
    MarginalCDF m;
    std::size_t count = 0;
    in >> kind >> m.rows >> count;
    m.kind = kind == "numeric" ? ColumnKind::Numeric : ColumnKind::Categorical;
    auto& values = m.kind == ColumnKind::Numeric ? m.sorted : m.cumulative;
    values.resize(count);
    for (auto& v : values) v = read_double(in);
    model.marginals_.push_back(std::move(m));
  }
  model.covariance_.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < model.covariance_.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.covariance_.cols(); ++j) model.covariance_(i, j) = read_double(in);
  }
  if (!in) throw SchemaError("truncated copula file");
  model.factorize();
  return model;
}

SyntheticDataset build_root_plus_synth(const TabularDataset& root, double synth_fraction_of_total,
                                       std::size_t total_train_size, std::uint64_t seed) {
  if (root.rows() == 0) throw std::invalid_argument("root data is empty");
  if (synth_fraction_of_total < 0.0) throw std::invalid_argument("synthetic fraction must be >= 0");
  const auto count = static_cast<std::size_t>(
      std::llround(synth_fraction_of_total * static_cast<double>(total_train_size)));
  SyntheticDataset out{root.subset([&] {
                         IndexList all(root.rows());
                         for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
                         return all;
                       }()),
                       std::vector<bool>(root.rows(), false)};
  if (count == 0) return out;
  const auto model = CopulaModel::fit(root);
  const auto synth = model.sample(count, seed);
  out.data = out.data.concat(synth.data);
  out.synthesized.insert(out.synthesized.end(), synth.synthesized.begin(), synth.synthesized.end());
  return out;
}

}  // namespace guardfed
