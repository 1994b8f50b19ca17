#include <stdexcept>
#include <string>
#include <unordered_map>

#include "iife/downstream.hpp"

namespace iife::downstream {
namespace {

using features::FeatureExpr;
using tabular::Table;

// Concatenates column-major blocks into one matrix.
Eigen::MatrixXd assemble(const std::vector<const std::vector<std::vector<double>>*>& parts,
                         std::size_t rows) {
  Eigen::Index cols = 0;
  for (const auto* p : parts) cols += static_cast<Eigen::Index>(p->size());
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), cols);
  Eigen::Index c = 0;
  for (const auto* p : parts) {
    for (const auto& column : *p) {
      X.col(c++) = Eigen::Map<const Eigen::VectorXd>(column.data(),
                                                     static_cast<Eigen::Index>(column.size()));
    }
  }
  return X;
}

// Class ids by first appearance across the given symbol lists.
std::vector<std::vector<int>> label_ids(std::initializer_list<const std::vector<std::string>*> lists) {
  std::unordered_map<std::string, int> ids;
  std::vector<std::vector<int>> out;
  for (const auto* list : lists) {
    auto& labels = out.emplace_back();
    labels.reserve(list->size());
    for (const auto& s : *list) {
      auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
      labels.push_back(it->second);
    }
  }
  return out;
}

struct Targets {
  std::span<const int> labels;
  std::span<const double> values;
};

// Trains on (X_train, train) and scores (X_test, test). Throws if the model
// cannot be trained or scored.
double fit_and_score(const Eigen::MatrixXd& X_train, const Targets& train,
                     const Eigen::MatrixXd& X_test, const Targets& test, const ModelSpec& model,
                     Metric metric, std::vector<std::string>& warnings) {
  if (model.kind == ModelKind::Lasso) {
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
        train.values.data(), static_cast<Eigen::Index>(train.values.size()));
    const FitResult fit =
        train_lasso(X_train, y, model.alpha, model.max_iterations, model.tolerance);
    if (!fit.converged) warnings.push_back("lasso did not converge");
    const Eigen::VectorXd pred = predict_values(fit, X_test);
    if (metric != Metric::OneMinusRAE) throw std::invalid_argument("lasso scores with 1-RAE");
    return metric_one_minus_rae(test.values, {pred.data(), static_cast<std::size_t>(pred.size())});
  }
  const FitResult fit =
      train_logreg(X_train, train.labels, model.C, model.max_iterations, model.tolerance);
  if (fit.single_class) warnings.push_back("single class in training labels");
  if (!fit.converged) warnings.push_back("logistic regression did not converge");
  const std::vector<int> pred = predict_classes(fit, X_test);
  if (metric != Metric::F1Micro) throw std::invalid_argument("logistic regression scores with F1");
  return metric_f1_micro(test.labels, pred);
}

}  // namespace

ModelSpec ModelSpec::with_strength(double value) const {
  ModelSpec out = *this;
  if (kind == ModelKind::Lasso) {
    out.alpha = value;
  } else {
    out.C = value;
  }
  return out;
}

void ModelSpec::validate(TaskKind task) const {
  if (kind == ModelKind::Lasso && task != TaskKind::Regression) {
    throw std::invalid_argument("lasso needs a regression task");
  }
  if (kind == ModelKind::LogisticRegression && task != TaskKind::Classification) {
    throw std::invalid_argument("logistic regression needs a classification task");
  }
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
}

void Evaluator::validate(TaskKind task) const {
  model.validate(task);
  if (metric != metric_for(task)) throw std::invalid_argument("metric does not match the task");
  if (folds.k < 2) throw std::invalid_argument("at least two folds are required");
}

FeatureBlock prepare_feature(const FeatureExpr& feature, const Table& train, const Table& test) {
  FeatureBlock block;
  if (feature.is_column() && train.column(feature.column_name()).is_categorical()) {
    const auto& name = feature.column_name();
    block.state.encoder = tabular::fit_onehot(train.column(name).symbols);
    block.train = tabular::apply_onehot(*block.state.encoder, train.column(name).symbols);
    block.test = tabular::apply_onehot(*block.state.encoder, test.column(name).symbols);
  } else {
    block.state.fitted = features::fit_expr(feature, train);
    block.train.push_back(block.state.fitted->evaluate(train));
    block.test.push_back(block.state.fitted->evaluate(test));
  }
  block.state.scaler = tabular::fit_minmax(block.train);
  block.train = tabular::apply_minmax(block.state.scaler, block.train);
  block.test = tabular::apply_minmax(block.state.scaler, block.test);
  return block;
}

Design prepare_design(std::span<const FeatureExpr> features, const Table& train,
                      const Table& test) {
  Design d;
  d.imputer = tabular::fit_imputer(train);
  const Table train_i = tabular::apply_imputer(d.imputer, train);
  const Table test_i = tabular::apply_imputer(d.imputer, test);
  std::vector<FeatureBlock> blocks;
  for (const auto& f : features) blocks.push_back(prepare_feature(f, train_i, test_i));
  std::vector<const std::vector<std::vector<double>>*> tr, te;
  for (const auto& b : blocks) {
    tr.push_back(&b.train);
    te.push_back(&b.test);
    d.states.push_back(b.state);
  }
  d.train_X = assemble(tr, train.n_rows());
  d.test_X = assemble(te, test.n_rows());
  return d;
}

CrossValidator::CrossValidator(const Table& table, Evaluator evaluator)
    : table_(table), evaluator_(std::move(evaluator)) {
  if (!table_.has_target()) throw std::invalid_argument("cross-validation needs a labeled table");
  evaluator_.validate(table_.task());
  if (evaluator_.folds.n_rows() != table_.n_rows()) {
    throw std::invalid_argument("fold plan does not match the table's row count");
  }
  for (std::size_t f = 0; f < evaluator_.folds.k; ++f) {
    const auto train_rows = evaluator_.folds.train_rows(f);
    auto test_rows = evaluator_.folds.test_rows(f);
    FoldData fold{table_.select_rows(train_rows), table_.select_rows(test_rows), {},
                  std::move(test_rows)};
    fold.imputer = tabular::fit_imputer(fold.train);
    fold.train = tabular::apply_imputer(fold.imputer, fold.train);
    fold.test = tabular::apply_imputer(fold.imputer, fold.test);
    folds_.push_back(std::move(fold));
  }
  if (table_.task() == TaskKind::Classification) {
    labels_ = label_ids({&table_.target().symbols}).front();
  } else {
    targets_ = table_.target().numbers;
  }
}

std::shared_ptr<const CrossValidator::CachedBlocks> CrossValidator::blocks_for(
    const FeatureExpr& feature) const {
  const std::string key = features::render_expr(feature);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto blocks = std::make_shared<CachedBlocks>();
  for (const auto& fold : folds_) blocks->push_back(prepare_feature(feature, fold.train, fold.test));
  std::lock_guard lock(cache_mutex_);
  return cache_.emplace(key, std::move(blocks)).first->second;
}

void CrossValidator::retain_only(std::span<const FeatureExpr> keep) const {
  std::unordered_map<std::string, std::shared_ptr<const CachedBlocks>> kept;
  std::lock_guard lock(cache_mutex_);
  for (const auto& f : keep) {
    const std::string key = features::render_expr(f);
    if (auto it = cache_.find(key); it != cache_.end()) kept.emplace(key, it->second);
  }
  cache_.swap(kept);
}

std::size_t CrossValidator::cache_size() const {
  std::lock_guard lock(cache_mutex_);
  return cache_.size();
}

CvResult CrossValidator::evaluate(std::span<const FeatureExpr> features) const {
  std::vector<std::shared_ptr<const CachedBlocks>> blocks;
  blocks.reserve(features.size());
  for (const auto& f : features) blocks.push_back(blocks_for(f));

  const bool classification = table_.task() == TaskKind::Classification;
  CvResult result;
  for (std::size_t f = 0; f < folds_.size(); ++f) {
    const FoldData& fold = folds_[f];
    std::vector<const std::vector<std::vector<double>>*> tr, te;
    for (const auto& b : blocks) {
      tr.push_back(&(*b)[f].train);
      te.push_back(&(*b)[f].test);
    }
    const Eigen::MatrixXd X_train = assemble(tr, fold.train.n_rows());
    const Eigen::MatrixXd X_test = assemble(te, fold.test.n_rows());

    const auto train_rows = evaluator_.folds.train_rows(f);
    std::vector<int> train_labels, test_labels;
    std::vector<double> train_values, test_values;
    for (std::size_t r : train_rows) {
      if (classification) {
        train_labels.push_back(labels_[r]);
      } else {
        train_values.push_back(targets_[r]);
      }
    }
    for (std::size_t r : fold.test_rows) {
      if (classification) {
        test_labels.push_back(labels_[r]);
      } else {
        test_values.push_back(targets_[r]);
      }
    }

    std::vector<std::string> warnings;
    double score = kMetricFloor;
    try {
      score = fit_and_score(X_train, {train_labels, train_values}, X_test,
                            {test_labels, test_values}, evaluator_.model, evaluator_.metric,
                            warnings);
    } catch (const std::exception& e) {
      warnings.push_back(std::string("fold scored at the metric floor: ") + e.what());
      score = kMetricFloor;
    }
    for (auto& w : warnings) result.warnings.push_back("fold " + std::to_string(f) + ": " + w);
    result.fold_scores.push_back(score);
  }
  double sum = 0.0;
  for (double s : result.fold_scores) sum += s;
  result.mean = sum / static_cast<double>(result.fold_scores.size());
  return result;
}

Design CrossValidator::fold_design(std::span<const FeatureExpr> features, std::size_t fold) const {
  if (fold >= folds_.size()) throw std::out_of_range("fold index out of range");
  Design d = prepare_design(features, folds_[fold].train, folds_[fold].test);
  d.imputer = folds_[fold].imputer;
  return d;
}

CvResult cross_validate(std::span<const FeatureExpr> features, const Table& t, const Evaluator& ev) {
  return CrossValidator(t, ev).evaluate(features);
}

double holdout_score(std::span<const FeatureExpr> features, const Table& train, const Table& test,
                     const ModelSpec& model, Metric metric) {
  const Design d = prepare_design(features, train, test);
  std::vector<std::string> warnings;
  if (train.task() == TaskKind::Classification) {
    const auto ids = label_ids({&train.target().symbols, &test.target().symbols});
    return fit_and_score(d.train_X, {ids[0], {}}, d.test_X, {ids[1], {}}, model, metric, warnings);
  }
  return fit_and_score(d.train_X, {{}, train.target().numbers}, d.test_X,
                       {{}, test.target().numbers}, model, metric, warnings);
}

std::vector<double> strength_grid(ModelKind kind) {
  if (kind == ModelKind::Lasso) return {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  return {0.01, 0.1, 1.0, 10.0, 100.0};
}

ModelSpec tune_strength(std::span<const FeatureExpr> features, const Table& t, const Evaluator& ev) {
  ModelSpec best = ev.model;
  double best_score = 0.0;
  bool first = true;
  for (double value : strength_grid(ev.model.kind)) {
    Evaluator trial = ev;
    trial.model = ev.model.with_strength(value);
    const double score = cross_validate(features, t, trial).mean;
    if (first || score > best_score) {
      best = trial.model;
      best_score = score;
      first = false;
    }
  }
  return best;
}

std::vector<FeatureExpr> column_features(const Table& t) {
  std::vector<FeatureExpr> out;
  for (const auto& name : t.feature_names()) out.push_back(FeatureExpr::column(name));
  return out;
}

}  // namespace iife::downstream
