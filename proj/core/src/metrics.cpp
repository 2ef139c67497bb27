#include "slowkill/metrics.hpp"

#include <algorithm>

namespace slowkill {

double miss_rate(std::span<const Index> est_support, std::span<const Index> true_support) {
  if (true_support.empty()) throw std::invalid_argument("miss_rate: empty true support");
  Index missed = 0;
  for (Index j : true_support)
    if (std::find(est_support.begin(), est_support.end(), j) == est_support.end()) ++missed;
  return static_cast<double>(missed) / static_cast<double>(true_support.size());
}

Eigen::VectorXd covariance_times(CovKind cov, double tau, const Eigen::VectorXd& d) {
  const Index p = d.size();
  if (cov == CovKind::Identity || tau == 0.0) return d;
  Eigen::VectorXd out(p);
  if (cov == CovKind::EqualCorrelation) {
    double total = d.sum();
    out = (1.0 - tau) * d;
    out.array() += tau * total;
    return out;
  }
  // Toeplitz [tau^|i-j|]: forward/backward geometric prefix sums
  Eigen::VectorXd fwd(p), bwd(p);
  fwd[0] = d[0];
  for (Index i = 1; i < p; ++i) fwd[i] = tau * fwd[i - 1] + d[i];
  bwd[p - 1] = d[p - 1];
  for (Index i = p - 2; i >= 0; --i) bwd[i] = tau * bwd[i + 1] + d[i];
  out = fwd + bwd - d;
  return out;
}

double pred_error_regression(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
                             CovKind cov, double tau) {
  check_dims(beta_hat.size() == beta_star.size(), "pred_error: coefficient sizes differ");
  Eigen::VectorXd d = beta_hat - beta_star;
  return 10.0 * d.dot(covariance_times(cov, tau, d));
}

double misclass_rate(const Eigen::VectorXd& beta_hat, double intercept,
                     const Eigen::MatrixXd& x_test, const Eigen::VectorXd& y_test) {
  check_dims(x_test.cols() == beta_hat.size() && x_test.rows() == y_test.size(),
             "misclass_rate: shapes disagree");
  Eigen::VectorXd score = x_test * beta_hat;
  Index wrong = 0;
  for (Index i = 0; i < y_test.size(); ++i) {
    double pred = (score[i] + intercept) > 0 ? 1.0 : 0.0;
    if (pred != y_test[i]) ++wrong;
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(y_test.size());
}

}  // namespace slowkill
