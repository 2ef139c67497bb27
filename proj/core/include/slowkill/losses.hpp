#pragma once

#include "slowkill/common.hpp"

namespace slowkill {

// Losses are stateless functions of the fitted values Xb and the response;
// the design matrix only enters through the majorization-gap wrappers.

enum class LossKind {
  Quadratic,           // 1/2 ||y - Xb||^2
  Logistic,            // sum_i [-y_i (Xb)_i + log(1 + exp((Xb)_i))], y in {0,1}
  ComplexQuadraticMmv  // 1/2 ||Y - XB||_F^2, complex multi-response
};

struct LossSpec {
  LossKind kind = LossKind::Quadratic;

  /// Lipschitz constant of the loss gradient w.r.t. fitted values.
  double lipschitz() const {
    return kind == LossKind::Logistic ? 0.25 : 1.0;
  }
};

double loss_value(LossKind kind, const Eigen::VectorXd& xb, const Eigen::VectorXd& y);
Eigen::VectorXd loss_gradient(LossKind kind, const Eigen::VectorXd& xb, const Eigen::VectorXd& y);

/// Generalized Bregman divergence between two fitted-value vectors:
/// l0(xb1) - l0(xb2) - <grad l0(xb2), xb1 - xb2>.
double bregman(LossKind kind, const Eigen::VectorXd& xb1, const Eigen::VectorXd& xb2,
               const Eigen::VectorXd& y);

/// (rho/2)||b1 - b2||^2 - Bregman(X b1, X b2). Nonnegativity of this gap is
/// the line-search acceptance criterion.
double majorization_gap(LossKind kind, double rho, const Eigen::VectorXd& beta1,
                        const Eigen::VectorXd& beta2, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& y);

// Complex multi-response quadratic loss. The Bregman divergence uses the
// symmetrized Hermitian form so the result is always real.
double mmv_loss_value(const Eigen::MatrixXcd& xb, const Eigen::MatrixXcd& y);
Eigen::MatrixXcd mmv_loss_gradient(const Eigen::MatrixXcd& xb, const Eigen::MatrixXcd& y);
double mmv_bregman(const Eigen::MatrixXcd& xb1, const Eigen::MatrixXcd& xb2,
                   const Eigen::MatrixXcd& y);
double mmv_majorization_gap(double rho, const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2,
                            const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& y);

/// Overflow-safe log(1 + exp(x)).
inline double log1pexp(double x) {
  return (x > 0 ? x : 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace slowkill
