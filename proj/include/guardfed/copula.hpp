#ifndef GUARDFED_COPULA_HPP
#define GUARDFED_COPULA_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "guardfed/core.hpp"
#include "guardfed/dataset.hpp"

namespace guardfed {

/// Empirical marginal of one column.
///
/// Numeric columns use mid-rank plotting positions, F(x) = (#{v < x} + #{v == x}/2) / r,
/// so the i-th order statistic of a tie-free column maps to (i - 0.5) / r. The
/// inverse linearly interpolates between order statistics.
///
/// Categorical columns map each code to the midpoint of its cumulative-frequency
/// interval; the inverse returns the code whose interval contains u.
///
/// Both directions clamp u to [1/(2r), 1 - 1/(2r)] so the probit stays finite.
struct MarginalCDF {
  ColumnKind kind = ColumnKind::Numeric;
  std::size_t rows = 0;
  std::vector<double> sorted;      // numeric
  std::vector<double> cumulative;  // categorical: K + 1 boundaries, cumulative[0] = 0

  static MarginalCDF fit(const Column& column);

  double clamp_lo() const { return 0.5 / static_cast<double>(rows); }
  double clamp_hi() const { return 1.0 - 0.5 / static_cast<double>(rows); }
  double cdf(double x) const;
  double inverse(double u) const;
};

struct SyntheticDataset {
  TabularDataset data;
  std::vector<bool> synthesized;  // false: real root row

  std::size_t size() const { return data.rows(); }
};

/// Gaussian copula over every column of a raw table, sensitive attribute and
/// label included, so sampled rows carry (x, a, y) jointly.
class CopulaModel {
 public:
  static constexpr double kRegularization = 1e-6;

  static CopulaModel fit(const TabularDataset& root);

  /// z_d = probit(F_d(x_d)).
  Vector to_gaussian(std::span<const double> row) const;
  /// x_d = F_d^{-1}(Phi(z_d)).
  std::vector<double> from_gaussian(const Vector& z) const;

  /// z ~ N(0, R) where R is the correlation matrix of the regularized
  /// covariance, so each Phi(z_d) stays uniform; then mapped back per column.
  SyntheticDataset sample(std::size_t m, std::uint64_t seed) const;

  const std::vector<MarginalCDF>& marginals() const { return marginals_; }
  /// Empirical covariance of the probit-transformed root rows plus eps * I.
  const Matrix& covariance() const { return covariance_; }
  /// Lower-triangular factor L with L L^T = R.
  const Matrix& factor() const { return factor_; }
  /// Zero-row table holding the schema and category dictionaries.
  const TabularDataset& prototype() const { return prototype_; }

  void save(std::ostream& out) const;
  static CopulaModel load(std::istream& in, const TabularDataset& prototype);

 private:
  void factorize();

  std::vector<MarginalCDF> marginals_;
  Matrix covariance_;
  Matrix factor_;
  TabularDataset prototype_;
};

/// Root rows plus round(synth_fraction_of_total * total_train_size) copula samples.
SyntheticDataset build_root_plus_synth(const TabularDataset& root, double synth_fraction_of_total,
                                       std::size_t total_train_size, std::uint64_t seed);

}  // namespace guardfed

#endif  // GUARDFED_COPULA_HPP
