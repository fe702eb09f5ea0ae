#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "guardfed/aggregation.hpp"
#include "guardfed/attacks.hpp"
#include "guardfed/copula.hpp"
#include "guardfed/experiment.hpp"
#include "guardfed/metrics.hpp"

using namespace guardfed;
namespace fs = std::filesystem;
using boost::multiprecision::cpp_bin_float_50;

namespace {

const fs::path kConfigs = GUARDFED_CONFIG_DIR;
const fs::path kData = GUARDFED_DATA_DIR;
const std::vector<std::uint64_t> kSeeds{1, 2, 3};

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Mean {
  double acc = 0.0;
  double aeod = 0.0;
  bool aeod_defined = true;
  std::string per_seed;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig config(const std::string& name, const std::map<std::string, std::string>& overrides = {}) {
  ExperimentConfig cfg = load_config(kConfigs / (name + ".cfg"));
  for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

// Final-round metrics averaged over the fixed seeds.
Mean run_seeds(const std::string& name, const std::map<std::string, std::string>& overrides = {}) {
  Mean m;
  for (auto seed : kSeeds) {
    ExperimentConfig cfg = config(name, overrides);
    cfg.seed = seed;
    const auto result = run_experiment(cfg);
    const EvalReport& e = result.rounds.back().eval;
    m.acc += e.accuracy / static_cast<double>(kSeeds.size());
    if (e.aeod) {
      m.aeod += *e.aeod / static_cast<double>(kSeeds.size());
    } else {
      m.aeod_defined = false;
    }
    m.per_seed += (m.per_seed.empty() ? "" : " ") + fmt("%.4f", e.accuracy) + "/" +
                  (e.aeod ? fmt("%.4f", *e.aeod) : std::string("undef"));
  }
  return m;
}

std::string describe(const Mean& m) {
  return "acc=" + fmt("%.4f", m.acc) + " aeod=" + (m.aeod_defined ? fmt("%.4f", m.aeod) : "undefined") +
         " [" + m.per_seed + "]";
}

Verdict criterion1() {
  const auto m = run_seeds("compas_iid_benign_guardfed");
  return {m.acc >= 0.63 && m.aeod_defined && m.aeod <= 0.10,
          "benign GuardFed COMPAS IID " + describe(m) + " need acc>=0.63 aeod<=0.10"};
}

Verdict criterion2() {
  const auto m = run_seeds("compas_iid_foe_fedavg");
  return {m.acc <= 0.58, "FedAvg under FOE COMPAS IID " + describe(m) + " need acc<=0.58"};
}

Verdict criterion3() {
  const auto g = run_seeds("compas_noniid_spdfa_guardfed");
  const auto benign = run_seeds("compas_noniid_benign_median");
  const auto attacked = run_seeds("compas_noniid_spdfa_median");
  const bool guard = g.acc >= 0.62 && g.aeod_defined && g.aeod <= 0.12;
  const bool median = benign.aeod_defined && attacked.aeod_defined && attacked.aeod >= 1.5 * benign.aeod;
  return {guard && median, "GuardFed Sp-DFA " + describe(g) + " need acc>=0.62 aeod<=0.12 (" +
                               (guard ? "met" : "missed") + "); Median benign " + describe(benign) +
                               " vs Sp-DFA " + describe(attacked) + " need attacked aeod >= 1.5x benign (" +
                               (median ? "met" : "missed") + ")"};
}

Verdict criterion4() {
  const auto m = run_seeds("adult_iid_benign_guardfed");
  return {m.acc >= 0.80, "benign GuardFed Adult IID " + describe(m) + " need acc>=0.80"};
}

Verdict criterion5() {
  const std::vector<std::string> taus{"0.1", "2", "50"};
  std::vector<Mean> runs;
  std::string detail = "Adult non-IID Sp-DFA";
  for (const auto& t : taus) {
    runs.push_back(run_seeds("adult_noniid_spdfa_guardfed", {{"tau", t}}));
    detail += " tau=" + t + " " + describe(runs.back()) + ";";
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    ok = ok && runs[i].aeod_defined && runs[i + 1].aeod_defined;
    ok = ok && runs[i + 1].aeod <= runs[i].aeod + 0.02;
    ok = ok && runs[i + 1].acc <= runs[i].acc + 0.015;
  }
  return {ok, detail + " need aeod and acc non-increasing in tau within 0.02 / 0.015"};
}

Verdict criterion6() {
  const auto small = run_seeds("adult_noniid_spdfa_guardfed", {{"server_fraction", "0.01"}});
  const auto large = run_seeds("adult_noniid_spdfa_guardfed", {{"server_fraction", "0.10"}});
  const bool ok = small.aeod_defined && large.aeod_defined && large.aeod <= small.aeod + 0.02;
  return {ok, "Adult non-IID Sp-DFA server 1% " + describe(small) + "; server 10% " + describe(large) +
                  " need aeod(10%) <= aeod(1%) + 0.02"};
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  }
  return m;
}

Verdict criterion7() {
  std::mt19937_64 rng(20240607);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Index> dims{static_cast<Eigen::Index>(1 + rng() % 6)};
    for (std::size_t h = rng() % 3; h > 0; --h) dims.push_back(static_cast<Eigen::Index>(2 + rng() % 7));
    dims.push_back(2);
    // Zero biases put deeper ReLUs exactly on the kink, so draw every parameter.
    Vector p(MlpModel::init(dims, 0).parameter_count());
    std::normal_distribution<double> nd(0.0, 0.7);
    for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = nd(rng);
    const auto m = MlpModel::from_parameters(dims, p);
    const auto n = static_cast<Eigen::Index>(1 + rng() % 12);
    const Matrix x = random_matrix(n, dims.front(), rng);
    Bits y(static_cast<std::size_t>(n));
    for (auto& v : y) v = static_cast<std::uint8_t>(rng() % 2);
    const Vector g = gradient(m, x, y);
    for (Eigen::Index k = 0; k < m.parameter_count(); ++k) {
      Vector plus = m.parameters(), minus = m.parameters();
      plus[k] += 1e-5;
      minus[k] -= 1e-5;
      const double fd = (loss(MlpModel::from_parameters(dims, plus), x, y) -
                         loss(MlpModel::from_parameters(dims, minus), x, y)) /
                        2e-5;
      worst = std::max(worst, std::abs(fd - g[k]) / std::max(1e-3, std::abs(fd) + std::abs(g[k])));
    }
  }
  return {worst <= 1e-4, "50 random architectures, max relative error " + fmt("%.3g", worst) + " need <=1e-4"};
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                             static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return d;
}

Verdict criterion8() {
  std::mt19937_64 rng(808);
  std::normal_distribution<double> n;
  std::gamma_distribution<double> g(2.0, 3.0);
  const std::size_t r = 500;
  std::vector<double> x(r), y(r), w(r), a(r), lab(r);
  for (std::size_t i = 0; i < r; ++i) {
    x[i] = n(rng);
    y[i] = 0.8 * x[i] + 0.6 * n(rng);
    w[i] = g(rng) - 0.5 * x[i];
    a[i] = static_cast<double>(rng() % 2);
    lab[i] = static_cast<double>(rng() % 2);
  }
  auto num = [](const std::string& name, std::vector<double> v) {
    return Column{{name, ColumnKind::Numeric, ColumnRole::Feature}, std::move(v), {}};
  };
  TabularDataset root({num("x", x), num("y", y), num("w", w),
                       Column{{"a", ColumnKind::Categorical, ColumnRole::Sensitive}, a, {"g0", "g1"}},
                       Column{{"label", ColumnKind::Categorical, ColumnRole::Label}, lab, {"n", "p"}}});
  const auto synth = CopulaModel::fit(root).sample(2000, 909);
  const std::vector<std::vector<double>> real{x, y, w};
  double ks = 0.0, dc = 0.0;
  for (std::size_t j = 0; j < 3; ++j) ks = std::max(ks, ks_distance(real[j], synth.data.column(j).values));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      dc = std::max(dc, std::abs(pearson(real[i], real[j]) -
                                 pearson(synth.data.column(i).values, synth.data.column(j).values)));
    }
  }
  return {ks <= 0.08 && dc <= 0.1,
          "max KS " + fmt("%.4f", ks) + " need <=0.08; max |dcorr| " + fmt("%.4f", dc) + " need <=0.1"};
}

Verdict criterion9() {
  std::mt19937_64 rng(909);
  std::size_t metric_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Bits pred(50), a(50), y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      pred[i] = static_cast<std::uint8_t>(rng() % 2);
      a[i] = static_cast<std::uint8_t>(rng() % 2);
      y[i] = static_cast<std::uint8_t>(rng() % 2);
    }
    auto rate = [&](int group, bool positives_only) {
      std::size_t hits = 0, total = 0;
      for (std::size_t i = 0; i < 50; ++i) {
        if (a[i] != group || (positives_only && y[i] != 1)) continue;
        ++total;
        hits += pred[i];
      }
      return total ? static_cast<double>(hits) / static_cast<double>(total) : std::nan("");
    };
    const auto c = GroupConfusion::count(pred, a, y);
    const double o_aspd = std::abs(rate(0, false) - rate(1, false));
    const double o_aeod = std::abs(rate(0, true) - rate(1, true));
    auto same = [](const std::function<double()>& f, double oracle) {
      try {
        return !std::isnan(oracle) && f() == oracle;
      } catch (const UndefinedMetric&) {
        return std::isnan(oracle);
      }
    };
    metric_mismatch += !same([&] { return c.aspd(); }, o_aspd);
    metric_mismatch += !same([&] { return c.aeod(); }, o_aeod);
  }

  std::uniform_real_distribution<double> u(0, 1), t(0, 50);
  double trust_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double dev = u(rng), fair = u(rng), tau = t(rng);
    const cpp_bin_float_50 expect =
        cpp_bin_float_50(dev) * boost::multiprecision::exp(-cpp_bin_float_50(tau) * cpp_bin_float_50(fair));
    trust_err = std::max(trust_err, std::abs(trust_score(dev, fair, tau) - static_cast<double>(expect)));
  }

  std::size_t median_mismatch = 0;
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 15;
    std::vector<Vector> ups(n, Vector(7));
    for (auto& v : ups) {
      for (Eigen::Index j = 0; j < 7; ++j) v[j] = nd(rng);
    }
    const Vector med = coordinate_median(ups);
    for (Eigen::Index j = 0; j < 7; ++j) {
      std::vector<double> col;
      for (const auto& v : ups) col.push_back(v[j]);
      std::sort(col.begin(), col.end());
      const double expect = n % 2 ? col[n / 2] : (col[n / 2 - 1] + col[n / 2]) / 2.0;
      median_mismatch += med[j] != expect;
    }
  }
  return {metric_mismatch == 0 && trust_err <= 1e-12 && median_mismatch == 0,
          "metric mismatches " + std::to_string(metric_mismatch) + "/200, trust max error " +
              fmt("%.3g", trust_err) + " need <=1e-12, median mismatches " + std::to_string(median_mismatch)};
}

EncodedDataset fixture_encoded() {
  const auto data = load_dataset(load_manifest(kData / "fixture.manifest"));
  IndexList all(data.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return Encoder::fit(data, all, true).transform(data);
}

Verdict criterion10() {
  const auto d = fixture_encoded();
  const auto twice = flip_sensitive(flip_sensitive(d));
  const bool involution = twice.sensitive == d.sensitive && twice.features == d.features && twice.labels == d.labels;

  const auto global = MlpModel::init({d.features.cols(), 8, 2}, 10);
  TrainConfig tc;
  tc.epochs = 2;
  tc.batch_size = 16;
  tc.learning_rate = 0.05;
  tc.seed = 10;
  AdversarySpec spec;
  spec.kind = AttackKind::SDfa;
  spec.dfa_perf = PerfMode::Gaussian;
  spec.sigma = 0.4;
  const auto dual = adversarial_update(0, Role::Dual, global, d, {}, spec, tc, 1010);
  const auto fair = adversarial_update(0, Role::Fairness, global, d, {}, spec, tc, 1010);
  const bool decomposition = dual.delta == inject_noise(fair.delta, 0.4, 1010);

  const Vector g = Vector::LinSpaced(100, -3, 3);
  const bool identity = inject_noise(g, 0.0, 5) == g;

  bool roles_ok = true;
  std::mt19937_64 rng(1010);
  for (std::size_t n = 1; n <= 40; ++n) {
    for (double ratio : {0.0, 0.2, 0.5, 0.8, 1.0}) {
      std::set<std::size_t> pool;
      while (pool.size() < n) pool.insert(rng() % 10000);
      const IndexList ids(pool.begin(), pool.end());
      AdversarySpec s;
      s.kind = AttackKind::SpDfa;
      s.split_ratio = ratio;
      const auto roles = assign_roles(ids, s, rng());
      std::size_t fair_n = 0, perf_n = 0;
      for (auto id : ids) {
        const auto it = roles.find(id);
        if (it == roles.end()) {
          roles_ok = false;
          continue;
        }
        fair_n += it->second == Role::Fairness;
        perf_n += it->second == Role::Performance;
      }
      roles_ok = roles_ok && roles.size() == n && fair_n + perf_n == n;
    }
  }
  const bool ok = involution && decomposition && identity && roles_ok;
  auto yn = [](bool b) { return std::string(b ? "ok" : "broken"); };
  return {ok, "flip involution " + yn(involution) + ", dual decomposition " + yn(decomposition) +
                  ", zero-sigma identity " + yn(identity) + ", Sp-DFA roles n=1..40 " + yn(roles_ok)};
}

Verdict criterion11() {
  const ExperimentConfig cfg = config("compas_noniid_spdfa_guardfed");
  std::ostringstream a, b;
  run_experiment(cfg, &a);
  run_experiment(cfg, &b);
  const bool same = !a.str().empty() && a.str() == b.str();
  return {same, "two runs of the non-IID Sp-DFA GuardFed config, " + std::to_string(a.str().size()) + " bytes, " +
                    (same ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  app.add_option("criteria", only, "Subset of criteria to run (default: all)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                        criterion5, criterion6, criterion7, criterion8,
                                                        criterion9, criterion10, criterion11};
  if (only.empty()) {
    only.resize(criteria.size());
    std::iota(only.begin(), only.end(), 1);
  }
  int failures = 0;
  for (int k : only) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(k - 1)]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("criterion %2d: %s  %s  (%.1fs)\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
