#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "iife/downstream.hpp"
#include "iife/random.hpp"
#include "iife/synthetic.hpp"
#include "support/oracles.hpp"

namespace iife::downstream {
namespace {

using features::FeatureExpr;
using tabular::Column;
using tabular::Table;

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, Rng& rng) {
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
  }
  return X;
}

Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

Evaluator lasso_evaluator(std::size_t n, double alpha = 0.001, std::uint64_t seed = 0) {
  Evaluator ev;
  ev.model.kind = ModelKind::Lasso;
  ev.model.alpha = alpha;
  ev.folds = tabular::make_folds(n, 5, seed);
  ev.metric = Metric::OneMinusRAE;
  return ev;
}

TEST(Lasso, AlphaZeroMatchesOls) {
  Rng rng(1);
  const Eigen::MatrixXd X = random_matrix(200, 5, rng);
  const Eigen::VectorXd y = X * random_vector(5, rng) + 0.3 * random_vector(200, rng);
  const FitResult fit = train_lasso(X, y, 0.0, 100000, 1e-13);
  const auto oracle = testing::ols(X, y);
  EXPECT_TRUE(fit.converged);
  EXPECT_LE((fit.weights[0] - oracle.beta).lpNorm<Eigen::Infinity>(), 1e-6);
  EXPECT_NEAR(fit.intercepts[0], oracle.intercept, 1e-6);
}

TEST(Lasso, OrthonormalDesignIsSoftThreshold) {
  Rng rng(2);
  const Eigen::Index n = 100, p = 4;
  Eigen::MatrixXd A = random_matrix(n, p, rng);
  A = A.rowwise() - A.colwise().mean();
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ() *
                            Eigen::MatrixXd::Identity(n, p);
  const Eigen::MatrixXd X = std::sqrt(static_cast<double>(n)) * Q;  // X'X / n = I
  const Eigen::VectorXd y = 3.0 * random_vector(n, rng);
  for (double alpha : {0.0, 0.05, 0.2, 0.8}) {
    const FitResult fit = train_lasso(X, y, alpha, 10000, 1e-12);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double expected = testing::soft_threshold(X.col(j).dot(y) / static_cast<double>(n), alpha);
      EXPECT_NEAR(fit.weights[0](j), expected, 1e-6);
    }
  }
}

TEST(Lasso, LargeAlphaZeroesEverything) {
  Rng rng(3);
  const Eigen::MatrixXd X = random_matrix(80, 6, rng);
  const Eigen::VectorXd y = random_vector(80, rng);
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const double bound = (Xc.transpose() * (y.array() - y.mean()).matrix()).cwiseAbs().maxCoeff() / 80.0;
  // The bound is itself rounded; a relative 1e-12 above it is still >= the exact bound.
  const FitResult fit = train_lasso(X, y, bound * (1 + 1e-12), 1000, 1e-10);
  EXPECT_EQ(fit.weights[0].squaredNorm(), 0.0);
  EXPECT_GT(train_lasso(X, y, bound * 0.99, 1000, 1e-10).weights[0].squaredNorm(), 0.0);
  EXPECT_NEAR(fit.intercepts[0], y.mean(), 1e-12);
}

TEST(Lasso, KktConditionsHoldAtConvergence) {
  Rng rng(4);
  const Eigen::MatrixXd X = random_matrix(150, 8, rng);
  const Eigen::VectorXd y = X.col(0) - 2 * X.col(3) + random_vector(150, rng);
  const double alpha = 0.1, tol = 1e-10;
  const FitResult fit = train_lasso(X, y, alpha, 100000, tol);
  ASSERT_TRUE(fit.converged);
  const Eigen::VectorXd r = y - predict_values(fit, X);
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double g = Xc.col(j).dot(r) / 150.0;
    if (fit.weights[0](j) == 0.0) {
      EXPECT_LE(std::abs(g), alpha + 1e-6);
    } else {
      EXPECT_NEAR(g, alpha * (fit.weights[0](j) > 0 ? 1 : -1), 1e-6);
    }
  }
}

TEST(Logistic, GradientMatchesCentralDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<Eigen::Index>(10 + rng.below(30));
    const auto p = static_cast<Eigen::Index>(1 + rng.below(5));
    const Eigen::MatrixXd X = random_matrix(n, p, rng);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = static_cast<double>(rng.below(2));
    const double C = 0.1 + 10 * rng.uniform();
    const Eigen::VectorXd w = random_vector(p, rng);
    const double b = rng.normal();

    const auto obj = logistic_objective(X, y, C, w, b);
    EXPECT_NEAR(obj.value, testing::logistic_loss(X, y, C, w, b), 1e-10);
    Eigen::VectorXd numeric(p + 1);
    const double h = 1e-6;
    for (Eigen::Index j = 0; j <= p; ++j) {
      Eigen::VectorXd wp = w, wm = w;
      double bp = b, bm = b;
      if (j < p) {
        wp(j) += h;
        wm(j) -= h;
      } else {
        bp += h;
        bm -= h;
      }
      numeric(j) = (testing::logistic_loss(X, y, C, wp, bp) - testing::logistic_loss(X, y, C, wm, bm)) /
                   (2 * h);
    }
    const double rel = (obj.gradient - numeric).norm() / std::max(obj.gradient.norm(), 1e-12);
    EXPECT_LE(rel, 1e-4) << "trial " << trial;
  }
}

TEST(Logistic, SeparableFeatureFitsPerfectlyAndStationary) {
  Eigen::MatrixXd X(100, 1);
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) {
    labels[i] = (i * 7) % 3 == 0 ? 1 : 0;
    X(i, 0) = labels[i];
  }
  const FitResult fit = train_logreg(X, labels, 1.0);
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(testing::accuracy(predict_classes(fit, X), labels), 1.0);
  Eigen::VectorXd y01(100);
  for (int i = 0; i < 100; ++i) y01(i) = labels[i];
  EXPECT_LE(logistic_objective(X, y01, 1.0, fit.weights[0], fit.intercepts[0])
                .gradient.lpNorm<Eigen::Infinity>(),
            1e-6);
}

TEST(Logistic, TinyCPredictsMajority) {
  Rng rng(6);
  const Eigen::MatrixXd X = random_matrix(100, 3, rng);
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) labels[i] = i < 70 ? 4 : 9;
  const FitResult fit = train_logreg(X, labels, 1e-9);
  EXPECT_LE(fit.weights[0].norm(), 1e-6);
  for (int c : predict_classes(fit, X)) EXPECT_EQ(c, 4);
}

TEST(Logistic, SingleClassPredictsConstant) {
  Rng rng(7);
  const Eigen::MatrixXd X = random_matrix(10, 2, rng);
  const std::vector<int> labels(10, 3);
  const FitResult fit = train_logreg(X, labels, 1.0);
  EXPECT_TRUE(fit.single_class);
  EXPECT_EQ(predict_classes(fit, X), labels);
}

TEST(Logistic, MulticlassOneVsRest) {
  Rng rng(8);
  Eigen::MatrixXd X(300, 2);
  std::vector<int> labels(300);
  const double centers[3][2] = {{0, 0}, {6, 0}, {0, 6}};
  for (int i = 0; i < 300; ++i) {
    labels[i] = i % 3;
    X(i, 0) = centers[i % 3][0] + rng.normal();
    X(i, 1) = centers[i % 3][1] + rng.normal();
  }
  const FitResult fit = train_logreg(X, labels, 10.0);
  EXPECT_EQ(fit.weights.size(), 3u);
  EXPECT_GE(testing::accuracy(predict_classes(fit, X), labels), 0.95);
}

TEST(Logistic, ArgmaxTiesGoToFirstClass) {
  FitResult fit;
  fit.classes = {2, 5, 7};
  fit.weights.assign(3, Eigen::VectorXd::Zero(1));
  fit.intercepts = {0.0, 0.0, 0.0};
  EXPECT_EQ(predict_classes(fit, Eigen::MatrixXd::Ones(2, 1)), (std::vector<int>{2, 2}));
}

TEST(Metrics, F1MicroExamplesAndAccuracyOracle) {
  const std::vector<int> a = {0, 0, 1, 1}, b = {0, 1, 1, 1};
  EXPECT_DOUBLE_EQ(metric_f1_micro(a, b), 0.75);
  EXPECT_DOUBLE_EQ(metric_f1_micro(a, a), 1.0);
  EXPECT_DOUBLE_EQ(metric_f1_micro(a, std::vector<int>{1, 1, 0, 0}), 0.0);
  EXPECT_THROW(metric_f1_micro(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> t(1 + rng.below(40)), p(t.size());
    for (auto& v : t) v = static_cast<int>(rng.below(4));
    for (auto& v : p) v = static_cast<int>(rng.below(4));
    EXPECT_NEAR(metric_f1_micro(t, p), testing::accuracy(t, p), 1e-15);
  }
}

TEST(Metrics, OneMinusRaeExamples) {
  const std::vector<double> y = {1, 2, 3};
  EXPECT_DOUBLE_EQ(metric_one_minus_rae(y, y), 1.0);
  EXPECT_DOUBLE_EQ(metric_one_minus_rae(y, std::vector<double>{2, 2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(metric_one_minus_rae(y, std::vector<double>{1, 2, 5}), 0.0);
  EXPECT_THROW(metric_one_minus_rae(std::vector<double>{4, 4}, std::vector<double>{4, 4}),
               std::domain_error);
}

TEST(ModelSpec, ValidatesAgainstTask) {
  ModelSpec m;
  EXPECT_NO_THROW(m.validate(TaskKind::Regression));
  EXPECT_THROW(m.validate(TaskKind::Classification), std::invalid_argument);
  m.alpha = -1;
  EXPECT_THROW(m.validate(TaskKind::Regression), std::invalid_argument);
  ModelSpec lr;
  lr.kind = ModelKind::LogisticRegression;
  lr.C = 0;
  EXPECT_THROW(lr.validate(TaskKind::Classification), std::invalid_argument);
  EXPECT_DOUBLE_EQ(lr.with_strength(3.0).C, 3.0);
}

TEST(CrossValidate, RealizableLinearTargetScoresHigh) {
  const Table t = synthetic::planted_table(500, 3, [](double a, double) { return 2 * a; }, 0.0, 1);
  const auto feats = column_features(t);
  const CvResult r = cross_validate(feats, t, lasso_evaluator(t.n_rows(), 1e-5));
  EXPECT_GE(r.mean, 0.99);
  EXPECT_EQ(r.fold_scores.size(), 5u);
  EXPECT_EQ(r.mean, cross_validate(feats, t, lasso_evaluator(t.n_rows(), 1e-5)).mean);
}

TEST(CrossValidate, ConstantFeatureIsInert) {
  const Table base = synthetic::planted_product(400, 4, 0.1, 2);
  const Table t = base.with_column(Column::numeric("const", std::vector<double>(400, 3.5)));
  auto feats = column_features(base);
  const double before = cross_validate(feats, t, lasso_evaluator(400)).mean;
  feats.push_back(FeatureExpr::column("const"));
  EXPECT_NEAR(cross_validate(feats, t, lasso_evaluator(400)).mean, before, 1e-6);
}

TEST(CrossValidate, UnscorableFoldsGetTheFloor) {
  const Table t({Column::numeric("x", std::vector<double>(50, 1.0)),
                 Column::numeric("y", std::vector<double>(50, 2.0))},
                "y", TaskKind::Regression);
  const CvResult r = cross_validate(column_features(t), t, lasso_evaluator(50));
  EXPECT_EQ(r.mean, kMetricFloor);
  EXPECT_EQ(r.warnings.size(), 5u);
}

TEST(CrossValidate, ClassificationWithCategoricalFeature) {
  Rng rng(10);
  std::vector<std::string> c(300), label(300);
  std::vector<double> x(300);
  for (std::size_t i = 0; i < 300; ++i) {
    c[i] = std::string(1, static_cast<char>('a' + rng.below(3)));
    x[i] = rng.normal();
    label[i] = (c[i] == "a") != (x[i] > 1.5) ? "yes" : "no";
  }
  const Table t({Column::categorical("c", c), Column::numeric("x", x), Column::categorical("label", label)},
                "label", TaskKind::Classification);
  Evaluator ev;
  ev.model.kind = ModelKind::LogisticRegression;
  ev.folds = tabular::make_folds(300, 5, 1);
  ev.metric = Metric::F1Micro;
  EXPECT_GE(cross_validate(column_features(t), t, ev).mean, 0.85);
  EXPECT_THROW(CrossValidator(t, lasso_evaluator(300)), std::invalid_argument);
}

TEST(CrossValidate, CacheIsTransparent) {
  const Table t = synthetic::planted_product(300, 4, 0.1, 5);
  const Evaluator ev = lasso_evaluator(300);
  const CrossValidator cv(t, ev);
  auto feats = column_features(t);
  feats.push_back(features::parse_expr("mul(col:F1,col:F2)"));
  const double first = cv.score(feats);
  EXPECT_EQ(cv.cache_size(), 5u);
  EXPECT_EQ(cv.score(feats), first);
  EXPECT_EQ(cross_validate(feats, t, ev).mean, first);
  cv.retain_only(std::span(feats).first(2));
  EXPECT_EQ(cv.cache_size(), 2u);
  EXPECT_EQ(cv.score(feats), first);
}

TEST(CrossValidate, PreprocessingIgnoresHeldOutValues) {
  Rng rng(11);
  std::vector<std::string> c(200);
  std::vector<double> x(200), y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    c[i] = std::string(1, static_cast<char>('a' + rng.below(5)));
    x[i] = rng.normal();
    y[i] = x[i] * (c[i] == "a" ? 2 : 1) + rng.normal();
  }
  const auto make = [&](const std::vector<std::string>& cc, const std::vector<double>& xx) {
    return Table({Column::categorical("c", cc), Column::numeric("x", xx), Column::numeric("y", y)}, "y",
                 TaskKind::Regression);
  };
  const Evaluator ev = lasso_evaluator(200);
  const std::vector<FeatureExpr> feats = {FeatureExpr::column("c"), FeatureExpr::column("x"),
                                          features::parse_expr("gbmean(col:c,col:x)")};
  const Design before = CrossValidator(make(c, x), ev).fold_design(feats, 2);
  for (std::size_t r : ev.folds.test_rows(2)) {
    c[r] = "zz";
    x[r] = 1e6;
  }
  const Design after = CrossValidator(make(c, x), ev).fold_design(feats, 2);
  EXPECT_EQ(before.states, after.states);
  EXPECT_EQ(before.imputer, after.imputer);
  EXPECT_EQ(before.train_X, after.train_X);
}

TEST(Tuning, PicksFromTheGrid) {
  const Table t = synthetic::planted_product(300, 4, 0.5, 6);
  const ModelSpec m = tune_strength(column_features(t), t, lasso_evaluator(300));
  const auto grid = strength_grid(ModelKind::Lasso);
  EXPECT_NE(std::find(grid.begin(), grid.end(), m.alpha), grid.end());
  EXPECT_EQ(strength_grid(ModelKind::LogisticRegression).size(), 5u);
}

TEST(Holdout, ScoresTestPartition) {
  const Table t = synthetic::planted_table(400, 3, [](double a, double b) { return a - b; }, 0.01, 7);
  const auto [train, test] = tabular::train_test_split(t, {0.25, 1});
  EXPECT_GE(holdout_score(column_features(train), train, test, ModelSpec{}, Metric::OneMinusRAE), 0.98);
}

}  // namespace
}  // namespace iife::downstream
