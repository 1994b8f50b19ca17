#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "iife/info.hpp"
#include "iife/random.hpp"
#include "iife/synthetic.hpp"
#include "support/oracles.hpp"

namespace iife::info {
namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<int> symbols(std::size_t n, int alphabet, Rng& rng) {
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet)));
  return v;
}

Variable as_categorical(const std::vector<int>& v) {
  return Variable::categorical(std::vector<double>(v.begin(), v.end()));
}

TEST(KnnMi, CorrelatedGaussianNearClosedForm) {
  const std::size_t n = 3000;
  const double rho = 0.9;
  const auto a = normals(n, 1);
  const auto b = normals(n, 2);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = rho * a[i] + std::sqrt(1 - rho * rho) * b[i];
  const auto est = knn_mi(Variable::numeric(a).view(), Variable::numeric(y).view(), {});
  EXPECT_NEAR(est.nats, -0.5 * std::log(1 - rho * rho), 0.10);
  EXPECT_FALSE(est.degenerate);
}

TEST(KnnMi, IndependentUniformsNearZero) {
  Rng rng(5);
  std::vector<double> a(3000), b(3000);
  for (auto& x : a) x = rng.uniform();
  for (auto& x : b) x = rng.uniform();
  EXPECT_LE(std::abs(knn_mi(Variable::numeric(a).view(), Variable::numeric(b).view(), {}).nats), 0.05);
}

TEST(KnnMi, ConstantInputIsDegenerateZero) {
  const auto a = normals(200, 3);
  const std::vector<double> c(200, 4.0);
  const auto est = knn_mi(Variable::numeric(a).view(), Variable::numeric(c).view(), {});
  EXPECT_TRUE(est.degenerate);
  EXPECT_EQ(est.nats, 0.0);
}

TEST(KnnMi, SymmetricInArguments) {
  const auto a = normals(500, 7);
  auto b = normals(500, 8);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += a[i];
  const auto va = Variable::numeric(a), vb = Variable::numeric(b);
  EXPECT_EQ(knn_mi(va.view(), vb.view(), {}).nats, knn_mi(vb.view(), va.view(), {}).nats);
}

TEST(KnnCmi, ConstantConditionEqualsMi) {
  const auto a = normals(400, 9);
  auto b = normals(400, 10);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += 0.5 * a[i];
  const auto va = Variable::numeric(a), vb = Variable::numeric(b);
  const auto z = Variable::categorical(std::vector<double>(400, 0.0));
  EXPECT_NEAR(knn_cmi(va.view(), vb.view(), z.view(), {}).nats, knn_mi(va.view(), vb.view(), {}).nats,
              1e-12);
}

TEST(PluginEntropy, MatchesCountingOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = symbols(500, 2 + trial % 3, rng);
    const auto b = symbols(500, 3, rng);
    const auto va = as_categorical(a), vb = as_categorical(b);
    const VariableView both[] = {va.view(), vb.view()};
    EXPECT_NEAR(plugin_entropy(both), testing::joint_entropy({&a, &b}), 1e-12);
  }
}

TEST(InteractionInformation, XorIsSynergy) {
  Rng rng(21);
  const auto a = symbols(3000, 2, rng);
  const auto b = symbols(3000, 2, rng);
  std::vector<int> y(a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] ^ b[i];
  const double tau = interaction_information(as_categorical(a).view(), as_categorical(b).view(),
                                             as_categorical(y).view(), {});
  EXPECT_NEAR(tau, std::numbers::ln2, 0.10);
  EXPECT_NEAR(tau, testing::plugin_tau(a, b, y), 0.10);
}

TEST(InteractionInformation, RedundantCopyIsNegative) {
  Rng rng(22);
  const auto a = symbols(3000, 3, rng);
  const double tau = interaction_information(as_categorical(a).view(), as_categorical(a).view(),
                                             as_categorical(a).view(), {});
  EXPECT_LT(tau, -0.2);
  EXPECT_NEAR(tau, testing::plugin_tau(a, a, a), 0.10);
}

TEST(InteractionInformation, IndependentTripleNearZero) {
  const auto a = Variable::numeric(normals(3000, 31));
  const auto b = Variable::numeric(normals(3000, 32));
  const auto y = Variable::numeric(normals(3000, 33));
  EXPECT_LE(std::abs(interaction_information(a.view(), b.view(), y.view(), {})), 0.05);
}

TEST(InteractionInformation, ExactlySymmetricInFeaturePair) {
  const auto a = Variable::numeric(normals(800, 41));
  const auto b = Variable::numeric(normals(800, 42));
  std::vector<double> y(800);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.values[i] * b.values[i];
  const auto vy = Variable::numeric(y);
  EXPECT_EQ(interaction_information(a.view(), b.view(), vy.view(), {}),
            interaction_information(b.view(), a.view(), vy.view(), {}));
}

TEST(InteractionInformation, PrecomputedMarginalGivesIdenticalTau) {
  const auto a = Variable::numeric(normals(600, 51));
  const auto b = Variable::numeric(normals(600, 52));
  std::vector<double> y(600);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a.values[i] + b.values[i];
  const auto vy = Variable::numeric(y);
  EstimatorConfig cfg;
  cfg.subsample_size = 300;
  cfg.seed = 4;
  const double m = marginal_term(a.view(), b.view(), cfg);
  EXPECT_EQ(interaction_information(a.view(), b.view(), vy.view(), cfg, m),
            interaction_information(a.view(), b.view(), vy.view(), cfg));
}

TEST(InteractionInformation, SubsampleIsSeededAndShared) {
  const auto a = Variable::numeric(normals(1500, 61));
  const auto b = Variable::numeric(normals(1500, 62));
  const auto y = Variable::numeric(normals(1500, 63));
  EstimatorConfig cfg;
  cfg.subsample_size = 400;
  cfg.seed = 9;
  const double t1 = interaction_information(a.view(), b.view(), y.view(), cfg);
  EXPECT_EQ(t1, interaction_information(a.view(), b.view(), y.view(), cfg));
  cfg.seed = 10;
  EXPECT_NE(t1, interaction_information(a.view(), b.view(), y.view(), cfg));
}

TEST(EstimatorConfig, Validates) {
  EstimatorConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.k = 5;
  cfg.subsample_size = 40;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  const auto a = Variable::numeric(normals(20, 1));
  EXPECT_THROW(knn_mi(a.view(), a.view(), EstimatorConfig{}), std::invalid_argument);
}

TEST(PairwiseIi, SortedCanonicalAndThreadInvariant) {
  const auto t = synthetic::planted_product(600, 5, 0.05, 3);
  std::vector<Variable> vars;
  for (const auto& name : t.feature_names()) vars.push_back(Variable::from_column(t.column(name)));
  std::vector<VariableView> views;
  for (const auto& v : vars) views.push_back(v.view());
  const auto y = Variable::from_column(t.target());

  auto pairs = all_pairs(vars.size());
  ASSERT_EQ(pairs.size(), 10u);
  for (auto& p : pairs) std::swap(p.first, p.second);
  const auto one = pairwise_ii(pairs, views, y.view(), {}, 1);
  const auto four = pairwise_ii(pairs, views, y.view(), {}, 4);
  EXPECT_EQ(one, four);
  for (std::size_t e = 0; e < one.size(); ++e) {
    EXPECT_LT(one[e].i, one[e].j);
    if (e > 0) EXPECT_GE(one[e - 1].tau, one[e].tau);
  }
  EXPECT_EQ(one.front().i, 0u);  // F1 x F2 is the planted synergy
  EXPECT_EQ(one.front().j, 1u);

  const FeaturePair self[] = {{2, 2}};
  EXPECT_THROW(pairwise_ii(self, views, y.view(), {}), std::invalid_argument);
  const FeaturePair dup[] = {{0, 1}, {1, 0}};
  EXPECT_THROW(pairwise_ii(dup, views, y.view(), {}), std::invalid_argument);
}

TEST(SortEntries, TiesBrokenByIndices) {
  std::vector<IIEntry> e = {{0.5, 2, 3}, {0.5, 0, 4}, {0.7, 5, 6}, {0.5, 0, 1}};
  sort_entries(e);
  EXPECT_EQ(e, (std::vector<IIEntry>{{0.7, 5, 6}, {0.5, 0, 1}, {0.5, 0, 4}, {0.5, 2, 3}}));
}

TEST(Prefilter, KeepsInformativeFeaturesInTableOrder) {
  const auto t = synthetic::planted_table(
      800, 6, [](double a, double b) { return a + 2 * b; }, 0.05, 4);
  EXPECT_EQ(prefilter_features(t, 2, {}), (std::vector<std::string>{"F1", "F2"}));
  EXPECT_EQ(prefilter_features(t, 50, {}).size(), 6u);
  EXPECT_THROW(prefilter_features(t, 1, {}), std::invalid_argument);
}

}  // namespace
}  // namespace iife::info
