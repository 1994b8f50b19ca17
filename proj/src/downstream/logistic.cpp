#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "iife/downstream.hpp"

namespace iife::downstream {
namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double objective_value(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01, double C,
                       const Eigen::VectorXd& w, double b) {
  const auto n = static_cast<double>(X.rows());
  const Eigen::VectorXd z = (X * w).array() + b;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - y01(i) * z(i);
  return loss / n + w.squaredNorm() / (2.0 * C * n);
}

struct BinaryFit {
  Eigen::VectorXd w;
  double b = 0.0;
  int iterations = 0;
  bool converged = false;
};

BinaryFit fit_binary(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01, double C,
                     int max_iterations, double tolerance) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  BinaryFit fit;
  fit.w = Eigen::VectorXd::Zero(p);

  for (int iter = 0; iter < max_iterations; ++iter) {
    const LogisticObjective obj = logistic_objective(X, y01, C, fit.w, fit.b);
    if (obj.gradient.lpNorm<Eigen::Infinity>() <= tolerance) {
      fit.converged = true;
      break;
    }
    // Hessian of the augmented parameter [w; b].
    const Eigen::VectorXd z = (X * fit.w).array() + fit.b;
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double q = sigmoid(z(i));
      s(i) = q * (1.0 - q);
    }
    Eigen::MatrixXd H(p + 1, p + 1);
    const Eigen::MatrixXd SX = s.asDiagonal() * X;
    H.topLeftCorner(p, p).noalias() = X.transpose() * SX / static_cast<double>(n);
    H.topLeftCorner(p, p).diagonal().array() += 1.0 / (C * static_cast<double>(n));
    const Eigen::VectorXd cross = SX.colwise().sum().transpose() / static_cast<double>(n);
    H.topRightCorner(p, 1) = cross;
    H.bottomLeftCorner(1, p) = cross.transpose();
    H(p, p) = s.sum() / static_cast<double>(n) + 1e-12;

    Eigen::VectorXd step = H.ldlt().solve(-obj.gradient);
    if (!step.allFinite() || step.dot(obj.gradient) >= 0.0) step = -obj.gradient;

    // Armijo backtracking.
    const double slope = step.dot(obj.gradient);
    double t = 1.0;
    Eigen::VectorXd w_next;
    double b_next = 0.0;
    for (int k = 0; k < 60; ++k) {
      w_next = fit.w + t * step.head(p);
      b_next = fit.b + t * step(p);
      if (objective_value(X, y01, C, w_next, b_next) <= obj.value + 1e-4 * t * slope) break;
      t *= 0.5;
    }
    fit.w = w_next;
    fit.b = b_next;
    fit.iterations = iter + 1;
  }
  return fit;
}

}  // namespace

LogisticObjective logistic_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y01, double C,
                                     const Eigen::VectorXd& w, double b) {
  const auto n = static_cast<double>(X.rows());
  const Eigen::VectorXd z = (X * w).array() + b;
  Eigen::VectorXd residual(z.size());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += softplus(z(i)) - y01(i) * z(i);
    residual(i) = sigmoid(z(i)) - y01(i);
  }
  LogisticObjective out;
  out.value = loss / n + w.squaredNorm() / (2.0 * C * n);
  out.gradient.resize(w.size() + 1);
  out.gradient.head(w.size()) = X.transpose() * residual / n + w / (C * n);
  out.gradient(w.size()) = residual.sum() / n;
  return out;
}

FitResult train_logreg(const Eigen::MatrixXd& X, std::span<const int> labels, double C,
                       int max_iterations, double tolerance) {
  if (static_cast<std::size_t>(X.rows()) != labels.size()) {
    throw std::invalid_argument("logreg: X rows and label count differ");
  }
  if (labels.empty()) throw std::invalid_argument("logreg: no rows");
  if (!(C > 0.0)) throw std::invalid_argument("logreg: C must be positive");
  if (!X.allFinite()) throw std::invalid_argument("logreg: non-finite input");

  const std::set<int> seen(labels.begin(), labels.end());
  FitResult fit;
  fit.classes.assign(seen.begin(), seen.end());
  if (fit.classes.size() == 1) {
    fit.single_class = true;
    return fit;
  }

  // Binary problems fit one model for the larger label; multiclass fits one
  // model per class.
  const std::vector<int> positives =
      fit.classes.size() == 2 ? std::vector<int>{fit.classes[1]} : fit.classes;
  for (int positive : positives) {
    Eigen::VectorXd y01(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      y01(i) = labels[static_cast<std::size_t>(i)] == positive ? 1.0 : 0.0;
    }
    BinaryFit b = fit_binary(X, y01, C, max_iterations, tolerance);
    fit.weights.push_back(std::move(b.w));
    fit.intercepts.push_back(b.b);
    fit.iterations = std::max(fit.iterations, b.iterations);
    fit.converged = fit.converged && b.converged;
  }
  return fit;
}

std::vector<int> predict_classes(const FitResult& fit, const Eigen::MatrixXd& X) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (fit.classes.empty()) throw std::invalid_argument("predict_classes needs a classification fit");
  if (fit.single_class) return std::vector<int>(n, fit.classes.front());

  std::vector<int> out(n);
  if (fit.classes.size() == 2) {
    const Eigen::VectorXd z = (X * fit.weights[0]).array() + fit.intercepts[0];
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = z(static_cast<Eigen::Index>(i)) > 0.0 ? fit.classes[1] : fit.classes[0];
    }
    return out;
  }
  Eigen::MatrixXd scores(X.rows(), static_cast<Eigen::Index>(fit.classes.size()));
  for (std::size_t c = 0; c < fit.classes.size(); ++c) {
    scores.col(static_cast<Eigen::Index>(c)) = (X * fit.weights[c]).array() + fit.intercepts[c];
  }
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(row, c) > scores(row, best)) best = c;
    }
    out[i] = fit.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

}  // namespace iife::downstream
