#pragma once

#include <span>

#include "slowkill/synthetic.hpp"

namespace slowkill {

/// Fraction of true support indices absent from the estimate.
double miss_rate(std::span<const Index> est_support, std::span<const Index> true_support);

/// Sigma * d for the structured covariances, without materializing Sigma.
Eigen::VectorXd covariance_times(CovKind cov, double tau, const Eigen::VectorXd& d);

/// 10 * (beta_hat - beta_star)^T Sigma (beta_hat - beta_star).
double pred_error_regression(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
                             CovKind cov, double tau);

/// Misclassification percentage, predicting 1 iff intercept + x^T beta > 0.
double misclass_rate(const Eigen::VectorXd& beta_hat, double intercept,
                     const Eigen::MatrixXd& x_test, const Eigen::VectorXd& y_test);

}  // namespace slowkill
