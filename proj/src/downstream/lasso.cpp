#include <cmath>
#include <stdexcept>

#include "iife/downstream.hpp"

namespace iife::downstream {
namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace

FitResult train_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha,
                      int max_iterations, double tolerance) {
  if (X.rows() != y.size()) throw std::invalid_argument("lasso: X rows and y length differ");
  if (X.rows() == 0) throw std::invalid_argument("lasso: no rows");
  if (alpha < 0.0) throw std::invalid_argument("lasso: alpha must be nonnegative");
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("lasso: non-finite input");

  const auto n = static_cast<double>(X.rows());
  const Eigen::Index p = X.cols();
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  Eigen::VectorXd residual = y.array() - y_mean;
  const Eigen::VectorXd col_sq = Xc.colwise().squaredNorm().transpose() / n;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  FitResult fit;
  fit.converged = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!(col_sq(j) > 0.0)) continue;
      const double rho = Xc.col(j).dot(residual) / n + col_sq(j) * beta(j);
      const double updated = soft_threshold(rho, alpha) / col_sq(j);
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        residual.noalias() -= delta * Xc.col(j);
        beta(j) = updated;
        max_change = std::max(max_change, std::abs(delta) * std::sqrt(col_sq(j)));
      }
    }
    fit.iterations = iter + 1;
    if (max_change < tolerance) {
      fit.converged = true;
      break;
    }
  }

  fit.weights.push_back(beta);
  fit.intercepts.push_back(y_mean - x_mean.dot(beta));
  return fit;
}

Eigen::VectorXd predict_values(const FitResult& fit, const Eigen::MatrixXd& X) {
  if (fit.weights.size() != 1) throw std::invalid_argument("predict_values needs a regression fit");
  return (X * fit.weights.front()).array() + fit.intercepts.front();
}

}  // namespace iife::downstream
