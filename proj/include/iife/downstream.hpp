#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "iife/features.hpp"
#include "iife/tabular.hpp"

namespace iife::downstream {

using tabular::TaskKind;

enum class ModelKind { Lasso, LogisticRegression };
enum class Metric { F1Micro, OneMinusRAE };

std::string_view to_string(ModelKind kind);
std::string_view to_string(Metric metric);
ModelKind parse_model_kind(std::string_view text);
Metric metric_for(TaskKind task);
ModelKind model_for(TaskKind task);

struct ModelSpec {
  ModelKind kind = ModelKind::Lasso;
  double alpha = 0.001;  // Lasso penalty
  double C = 1.0;        // logistic inverse regularization
  int max_iterations = 1000;
  double tolerance = 1e-6;

  // The tuned hyperparameter of this model kind (alpha or C).
  double strength() const { return kind == ModelKind::Lasso ? alpha : C; }
  ModelSpec with_strength(double value) const;
  void validate(TaskKind task) const;
};

struct FitResult {
  // Regression and binary problems hold one weight vector; multiclass holds
  // one per class in `classes` (one-vs-rest).
  std::vector<Eigen::VectorXd> weights;
  std::vector<double> intercepts;
  std::vector<int> classes;  // labels seen in training, ascending
  int iterations = 0;
  bool converged = true;
  // Training labels held a single class; predictions are that class.
  bool single_class = false;
};

// Coordinate descent on (1/2n)||y - X b - b0||^2 + alpha ||b||_1 with an
// unpenalized intercept. `converged` is false if max_iterations ran out.
FitResult train_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                      int max_iterations = 1000, double tolerance = 1e-6);

// Mean cross-entropy + ||w||^2 / (2 C n), minimized by damped Newton steps;
// multiclass via one-vs-rest.
FitResult train_logreg(const Eigen::MatrixXd& X, std::span<const int> labels, double C,
                       int max_iterations = 100, double tolerance = 1e-8);

struct LogisticObjective {
  double value = 0.0;
  Eigen::VectorXd gradient;  // [d/dw; d/db]
};

// Binary objective at (w, b) for 0/1 targets.
LogisticObjective logistic_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01, double C,
                                     const Eigen::VectorXd& w, double b);

Eigen::VectorXd predict_values(const FitResult& fit, const Eigen::MatrixXd& X);
// argmax of one-vs-rest scores, first class on ties.
std::vector<int> predict_classes(const FitResult& fit, const Eigen::MatrixXd& X);

double metric_f1_micro(std::span<const int> truth, std::span<const int> predicted);
double metric_one_minus_rae(std::span<const double> truth, std::span<const double> predicted);

// Score substituted for a fold whose model cannot be trained or scored.
inline constexpr double kMetricFloor = 0.0;

struct Evaluator {
  ModelSpec model;
  tabular::FoldPlan folds;
  Metric metric = Metric::OneMinusRAE;
  bool drop_division_ops = false;

  void validate(TaskKind task) const;
};

// Preprocessing fitted on one training partition for one feature.
struct FeatureState {
  std::optional<tabular::EncoderState> encoder;  // categorical column, one-hot
  std::optional<features::FittedExpr> fitted;    // engineered expression
  tabular::ScalerState scaler;
  bool operator==(const FeatureState&) const = default;
};

// Scaled design columns of one feature on a train/test partition.
struct FeatureBlock {
  std::vector<std::vector<double>> train;
  std::vector<std::vector<double>> test;
  FeatureState state;
};

// Imputes, encodes or evaluates, then min-max scales one feature with every
// statistic taken from `train`. Inputs must already be imputed.
FeatureBlock prepare_feature(const features::FeatureExpr& feature, const tabular::Table& train,
                             const tabular::Table& test);

struct Design {
  Eigen::MatrixXd train_X;
  Eigen::MatrixXd test_X;
  tabular::ImputerState imputer;
  std::vector<FeatureState> states;  // one per feature
};

Design prepare_design(std::span<const features::FeatureExpr> features, const tabular::Table& train,
                      const tabular::Table& test);

struct CvResult {
  double mean = 0.0;
  std::vector<double> fold_scores;
  std::vector<std::string> warnings;
};

// Cross-validation harness over one table. Per-feature fold blocks are
// memoized by rendered expression, so re-scoring sets that share features
// only refits the model. Safe to call concurrently.
class CrossValidator {
 public:
  CrossValidator(const tabular::Table& table, Evaluator evaluator);

  const Evaluator& evaluator() const { return evaluator_; }
  const tabular::Table& table() const { return table_; }

  CvResult evaluate(std::span<const features::FeatureExpr> features) const;
  double score(std::span<const features::FeatureExpr> features) const {
    return evaluate(features).mean;
  }

  // Preprocessing states fitted for `fold`, for inspection.
  Design fold_design(std::span<const features::FeatureExpr> features, std::size_t fold) const;

  // Drops memoized blocks for every feature not in `keep`.
  void retain_only(std::span<const features::FeatureExpr> keep) const;
  std::size_t cache_size() const;

 private:
  struct FoldData {
    tabular::Table train;
    tabular::Table test;
    tabular::ImputerState imputer;
    std::vector<std::size_t> test_rows;
  };
  using CachedBlocks = std::vector<FeatureBlock>;  // one per fold

  std::shared_ptr<const CachedBlocks> blocks_for(const features::FeatureExpr& feature) const;

  tabular::Table table_;
  Evaluator evaluator_;
  std::vector<FoldData> folds_;
  std::vector<int> labels_;      // classification targets as ids
  std::vector<double> targets_;  // regression targets
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, std::shared_ptr<const CachedBlocks>> cache_;
};

CvResult cross_validate(std::span<const features::FeatureExpr> features, const tabular::Table& t,
                        const Evaluator& ev);

// Fits the preprocessing and model on `train` and scores `test`.
double holdout_score(std::span<const features::FeatureExpr> features, const tabular::Table& train,
                     const tabular::Table& test, const ModelSpec& model, Metric metric);

// Five log-spaced strengths tried by tune_strength.
std::vector<double> strength_grid(ModelKind kind);

// Picks the grid strength with the best CV score (first on ties).
ModelSpec tune_strength(std::span<const features::FeatureExpr> features, const tabular::Table& t,
                        const Evaluator& ev);

// Original columns of t as features, in table order.
std::vector<features::FeatureExpr> column_features(const tabular::Table& t);

}  // namespace iife::downstream
