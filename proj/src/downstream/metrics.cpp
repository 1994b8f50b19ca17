#include <cmath>
#include <stdexcept>

#include "iife/downstream.hpp"

namespace iife::downstream {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Lasso ? "lasso" : "logreg";
}

std::string_view to_string(Metric metric) {
  return metric == Metric::F1Micro ? "f1_micro" : "one_minus_rae";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "lasso") return ModelKind::Lasso;
  if (text == "logreg" || text == "logistic") return ModelKind::LogisticRegression;
  throw std::invalid_argument("unknown model '" + std::string(text) + "' (expected lasso or logreg)");
}

Metric metric_for(TaskKind task) {
  return task == TaskKind::Classification ? Metric::F1Micro : Metric::OneMinusRAE;
}

ModelKind model_for(TaskKind task) {
  return task == TaskKind::Classification ? ModelKind::LogisticRegression : ModelKind::Lasso;
}

double metric_f1_micro(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("f1: length mismatch");
  if (truth.empty()) throw std::invalid_argument("f1: empty input");
  // Single-label: every wrong prediction is one false positive (for the
  // predicted class) and one false negative (for the true class).
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == predicted[i]) {
      tp += 1.0;
    } else {
      fp += 1.0;
      fn += 1.0;
    }
  }
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

double metric_one_minus_rae(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("1-RAE: length mismatch");
  if (truth.empty()) throw std::invalid_argument("1-RAE: empty input");
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double err = 0.0;
  double base = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    err += std::abs(truth[i] - predicted[i]);
    base += std::abs(truth[i] - mean);
  }
  if (!(base > 0.0)) throw std::domain_error("1-RAE undefined for a constant target");
  return 1.0 - err / base;
}

}  // namespace iife::downstream
