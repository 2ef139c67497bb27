#include "slowkill/losses.hpp"

#include <cmath>

namespace slowkill {

namespace {

void check_real_inputs(LossKind kind, const Eigen::VectorXd& xb, const Eigen::VectorXd& y) {
  check_dims(xb.size() == y.size(), "loss: fitted values and response sizes differ");
  if (kind == LossKind::Logistic) {
    for (Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0)
        throw std::invalid_argument("logistic loss: response entries must be 0 or 1");
    }
  }
  if (kind == LossKind::ComplexQuadraticMmv)
    throw std::invalid_argument("complex MMV loss requires complex inputs");
}

}  // namespace

double loss_value(LossKind kind, const Eigen::VectorXd& xb, const Eigen::VectorXd& y) {
  check_real_inputs(kind, xb, y);
  if (kind == LossKind::Quadratic) return 0.5 * (y - xb).squaredNorm();
  double v = 0.0;
  for (Index i = 0; i < xb.size(); ++i) v += -y[i] * xb[i] + log1pexp(xb[i]);
  return v;
}

Eigen::VectorXd loss_gradient(LossKind kind, const Eigen::VectorXd& xb, const Eigen::VectorXd& y) {
  check_real_inputs(kind, xb, y);
  if (kind == LossKind::Quadratic) return xb - y;
  Eigen::VectorXd g(xb.size());
  for (Index i = 0; i < xb.size(); ++i) g[i] = sigmoid(xb[i]) - y[i];
  return g;
}

double bregman(LossKind kind, const Eigen::VectorXd& xb1, const Eigen::VectorXd& xb2,
               const Eigen::VectorXd& y) {
  check_dims(xb1.size() == xb2.size(), "bregman: fitted value sizes differ");
  if (kind == LossKind::Quadratic) return 0.5 * (xb1 - xb2).squaredNorm();
  return loss_value(kind, xb1, y) - loss_value(kind, xb2, y) -
         loss_gradient(kind, xb2, y).dot(xb1 - xb2);
}

double majorization_gap(LossKind kind, double rho, const Eigen::VectorXd& beta1,
                        const Eigen::VectorXd& beta2, const Eigen::MatrixXd& X,
                        const Eigen::VectorXd& y) {
  check_dims(beta1.size() == X.cols() && beta2.size() == X.cols(),
             "majorization_gap: coefficient size does not match design");
  if (rho <= 0) throw std::invalid_argument("majorization_gap: rho must be positive");
  return 0.5 * rho * (beta1 - beta2).squaredNorm() - bregman(kind, X * beta1, X * beta2, y);
}

double mmv_loss_value(const Eigen::MatrixXcd& xb, const Eigen::MatrixXcd& y) {
  check_dims(xb.rows() == y.rows() && xb.cols() == y.cols(),
             "mmv loss: fitted values and response shapes differ");
  return 0.5 * (y - xb).squaredNorm();
}

Eigen::MatrixXcd mmv_loss_gradient(const Eigen::MatrixXcd& xb, const Eigen::MatrixXcd& y) {
  check_dims(xb.rows() == y.rows() && xb.cols() == y.cols(),
             "mmv loss: fitted values and response shapes differ");
  return xb - y;
}

double mmv_bregman(const Eigen::MatrixXcd& xb1, const Eigen::MatrixXcd& xb2,
                   const Eigen::MatrixXcd& y) {
  check_dims(xb1.rows() == xb2.rows() && xb1.cols() == xb2.cols(),
             "mmv bregman: fitted value shapes differ");
  // l(xb1) - l(xb2) - (<g, d> + <d, g>)/2 with the Hermitian inner product;
  // the symmetrized pairing is the real part of tr(g^H d).
  Eigen::MatrixXcd g = mmv_loss_gradient(xb2, y);
  Eigen::MatrixXcd d = xb1 - xb2;
  double pairing = g.conjugate().cwiseProduct(d).sum().real();
  return mmv_loss_value(xb1, y) - mmv_loss_value(xb2, y) - pairing;
}

double mmv_majorization_gap(double rho, const Eigen::MatrixXcd& b1, const Eigen::MatrixXcd& b2,
                            const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& y) {
  check_dims(b1.rows() == X.cols() && b2.rows() == X.cols(),
             "mmv majorization_gap: coefficient rows do not match design");
  if (rho <= 0) throw std::invalid_argument("majorization_gap: rho must be positive");
  return 0.5 * rho * (b1 - b2).squaredNorm() - mmv_bregman(X * b1, X * b2, y);
}

}  // namespace slowkill
