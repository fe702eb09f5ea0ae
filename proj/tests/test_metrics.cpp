#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "guardfed/metrics.hpp"

using namespace guardfed;

namespace {

struct Rows {
  Bits pred, a, y;
  void add(int p, int s, int l, int times = 1) {
    for (int i = 0; i < times; ++i) {
      pred.push_back(static_cast<std::uint8_t>(p));
      a.push_back(static_cast<std::uint8_t>(s));
      y.push_back(static_cast<std::uint8_t>(l));
    }
  }
};

// Brute force: filter rows per group and count with std::count_if.
struct Oracle {
  static double rate(const Rows& r, int group, bool positives_only) {
    std::size_t hits = 0, n = 0;
    for (std::size_t i = 0; i < r.a.size(); ++i) {
      if (r.a[i] != group || (positives_only && r.y[i] != 1)) continue;
      ++n;
      hits += r.pred[i];
    }
    if (n == 0) return std::nan("");
    return static_cast<double>(hits) / static_cast<double>(n);
  }
  static double aspd(const Rows& r) { return std::abs(rate(r, 0, false) - rate(r, 1, false)); }
  static double aeod(const Rows& r) { return std::abs(rate(r, 0, true) - rate(r, 1, true)); }
};

Rows random_rows(std::size_t n, std::mt19937_64& rng) {
  Rows r;
  for (std::size_t i = 0; i < n; ++i) {
    r.add(static_cast<int>(rng() % 2), static_cast<int>(rng() % 2), static_cast<int>(rng() % 2));
  }
  return r;
}

Rows flipped_groups(Rows r) {
  for (auto& s : r.a) s = static_cast<std::uint8_t>(1 - s);
  return r;
}

// Constant predictor: zero weights, bias favouring `cls`.
MlpModel constant_model(Eigen::Index width, int cls) {
  Vector p = Vector::Zero(width * 2 + 2);
  p[width * 2 + cls] = 1.0;
  return MlpModel::from_parameters({width, 2}, p);
}

}  // namespace

TEST(Accuracy, MajorityPredictorOnSeventyThirty) {
  EncodedDataset d;
  d.features = Matrix::Zero(100, 3);
  for (int i = 0; i < 100; ++i) {
    d.labels.push_back(i < 70 ? 1 : 0);
    d.sensitive.push_back(static_cast<std::uint8_t>(i % 2));
  }
  EXPECT_DOUBLE_EQ(accuracy(constant_model(3, 1), d), 0.70);
  EXPECT_DOUBLE_EQ(accuracy(constant_model(3, 0), d), 0.30);
}

TEST(Accuracy, PerfectAndHandCounted) {
  const Bits y{1, 0, 1, 1, 0, 0, 1, 0, 1, 1};
  EXPECT_DOUBLE_EQ(accuracy(y, y), 1.0);
  const Bits p{1, 1, 1, 0, 0, 0, 0, 0, 1, 0};
  // Matches at rows 0, 2, 4, 5, 7, 8.
  EXPECT_DOUBLE_EQ(accuracy(p, y), 0.6);
  EXPECT_ANY_THROW(accuracy(Bits{}, Bits{}));
}

TEST(Aspd, CraftedSixtyVersusThirtyFive) {
  Rows r;
  r.add(1, 0, 0, 12);
  r.add(0, 0, 1, 8);
  r.add(1, 1, 1, 7);
  r.add(0, 1, 0, 13);
  const auto c = GroupConfusion::count(r.pred, r.a, r.y);
  EXPECT_NEAR(c.aspd(), 0.25, 1e-15);
  EXPECT_EQ(c.total[0], 20u);
  EXPECT_EQ(c.predicted_positive[1], 7u);
}

TEST(Aspd, EqualRatesIsZeroAndMissingGroupIsUndefined) {
  Rows r;
  r.add(1, 0, 1, 3);
  r.add(0, 0, 0, 2);
  r.add(1, 1, 0, 6);
  r.add(0, 1, 1, 4);
  EXPECT_DOUBLE_EQ(GroupConfusion::count(r.pred, r.a, r.y).aspd(), 0.0);
  Rows one;
  one.add(1, 0, 1, 5);
  EXPECT_THROW(GroupConfusion::count(one.pred, one.a, one.y).aspd(), UndefinedMetric);
}

TEST(Aspd, PredictorIgnoringGroupIsNearZero) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  EncodedDataset d;
  d.features.resize(2000, 2);
  for (Eigen::Index i = 0; i < 2000; ++i) {
    const auto a = static_cast<std::uint8_t>(i % 2);
    d.features(i, 0) = n(rng);
    d.features(i, 1) = a;
    d.sensitive.push_back(a);
    d.labels.push_back(static_cast<std::uint8_t>(rng() % 2));
  }
  Vector p(6);
  p << 0.0, 0.0, 1.5, 0.0, 0.0, 0.1;  // class-1 logit depends on feature 0 only
  EXPECT_LE(aspd(MlpModel::from_parameters({2, 2}, p), d), 0.05);
}

TEST(Aeod, CraftedEightyVersusFifty) {
  Rows r;
  r.add(1, 0, 1, 8);
  r.add(0, 0, 1, 2);
  r.add(1, 0, 0, 5);
  r.add(1, 1, 1, 5);
  r.add(0, 1, 1, 5);
  r.add(0, 1, 0, 9);
  EXPECT_NEAR(GroupConfusion::count(r.pred, r.a, r.y).aeod(), 0.3, 1e-15);
}

TEST(Aeod, AllPositivePredictorIsZeroAndNoPositivesIsUndefined) {
  Rows r;
  r.add(1, 0, 1, 4);
  r.add(1, 0, 0, 3);
  r.add(1, 1, 1, 2);
  r.add(1, 1, 0, 7);
  EXPECT_DOUBLE_EQ(GroupConfusion::count(r.pred, r.a, r.y).aeod(), 0.0);
  Rows none;
  none.add(1, 0, 1, 4);
  none.add(0, 1, 0, 4);
  EXPECT_THROW(GroupConfusion::count(none.pred, none.a, none.y).aeod(), UndefinedMetric);
}

TEST(FairnessMetrics, MatchBruteForceOracleExactly) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Rows r = random_rows(50, rng);
    const auto c = GroupConfusion::count(r.pred, r.a, r.y);
    const double o_aspd = Oracle::aspd(r);
    const double o_aeod = Oracle::aeod(r);
    if (std::isnan(o_aspd)) {
      EXPECT_THROW(c.aspd(), UndefinedMetric);
    } else {
      EXPECT_EQ(c.aspd(), o_aspd);
      EXPECT_GE(c.aspd(), 0.0);
      EXPECT_LE(c.aspd(), 1.0);
    }
    if (std::isnan(o_aeod)) {
      EXPECT_THROW(c.aeod(), UndefinedMetric);
    } else {
      EXPECT_EQ(c.aeod(), o_aeod);
      EXPECT_GE(c.aeod(), 0.0);
      EXPECT_LE(c.aeod(), 1.0);
    }
  }
}

TEST(FairnessMetrics, SymmetricUnderGroupSwapAndInvariantUnderPermutation) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Rows r = random_rows(50, rng);
    const auto c = GroupConfusion::count(r.pred, r.a, r.y);
    const Rows s = flipped_groups(r);
    const auto cs = GroupConfusion::count(s.pred, s.a, s.y);
    EXPECT_EQ(c.aspd(), cs.aspd());
    EXPECT_EQ(c.aeod(), cs.aeod());

    std::vector<std::size_t> perm(50);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Rows p;
    for (auto i : perm) p.add(r.pred[i], r.a[i], r.y[i]);
    const auto cp = GroupConfusion::count(p.pred, p.a, p.y);
    EXPECT_EQ(c.aspd(), cp.aspd());
    EXPECT_EQ(c.aeod(), cp.aeod());
  }
}

TEST(FairnessIndex, EqualsAeodOnSameData) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 20; ++trial) {
    EncodedDataset d;
    d.features.resize(60, 3);
    for (Eigen::Index i = 0; i < 60; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) d.features(i, j) = n(rng);
      d.sensitive.push_back(static_cast<std::uint8_t>(i % 2));
      d.labels.push_back(static_cast<std::uint8_t>((i / 2) % 2));
    }
    const auto m = MlpModel::init({3, 4, 2}, rng());
    EXPECT_EQ(fairness_index(m, d), aeod(m, d));
    const auto c = GroupConfusion::count(m.predict(d.features), d.sensitive, d.labels);
    EXPECT_EQ(fairness_index(m, d), c.aeod());
  }
}

TEST(Evaluate, AccuracyGate) {
  Rows half;
  half.add(1, 0, 1, 25);
  half.add(1, 0, 0, 25);
  half.add(1, 1, 1, 25);
  half.add(1, 1, 0, 25);
  const auto low = evaluate(half.pred, half.a, half.y, 0.60);
  EXPECT_DOUBLE_EQ(low.accuracy, 0.5);
  ASSERT_TRUE(low.aeod);
  EXPECT_DOUBLE_EQ(*low.aeod, 0.0);
  EXPECT_FALSE(low.fairness_valid);

  Rows good;
  good.add(1, 0, 1, 33);
  good.add(0, 0, 1, 17);
  good.add(1, 1, 1, 33);
  good.add(0, 1, 1, 17);
  const auto ok = evaluate(good.pred, good.a, good.y, 0.60);
  EXPECT_DOUBLE_EQ(ok.accuracy, 0.66);
  EXPECT_TRUE(ok.fairness_valid);

  Rows adult;
  adult.add(1, 0, 1, 79);
  adult.add(0, 1, 1, 21);
  const auto below = evaluate(adult.pred, adult.a, adult.y, 0.80);
  EXPECT_DOUBLE_EQ(below.accuracy, 0.79);
  EXPECT_FALSE(below.fairness_valid);
  EXPECT_DOUBLE_EQ(below.threshold, 0.80);
}

TEST(Evaluate, UndefinedMetricsAreFlaggedNotZero) {
  Rows r;
  r.add(1, 0, 1, 5);
  r.add(0, 0, 0, 5);
  const auto rep = evaluate(r.pred, r.a, r.y, 0.6);
  EXPECT_FALSE(rep.aspd);
  EXPECT_FALSE(rep.aeod);
  EXPECT_FALSE(rep.undefined_reason.empty());
  EXPECT_DOUBLE_EQ(rep.accuracy, 1.0);
}

TEST(Evaluate, ModelOverloadMatchesPredictionOverload) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  EncodedDataset d;
  d.features.resize(80, 2);
  for (Eigen::Index i = 0; i < 80; ++i) {
    d.features(i, 0) = n(rng);
    d.features(i, 1) = n(rng);
    d.sensitive.push_back(static_cast<std::uint8_t>(rng() % 2));
    d.labels.push_back(static_cast<std::uint8_t>(rng() % 2));
  }
  const auto m = MlpModel::init({2, 5, 2}, 4);
  const auto a = evaluate(m, d, 0.6);
  const auto b = evaluate(m.predict(d.features), d.sensitive, d.labels, 0.6);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_EQ(a.aspd, b.aspd);
  EXPECT_EQ(a.aeod, b.aeod);
  EXPECT_EQ(a.fairness_valid, a.accuracy >= 0.6);
}
