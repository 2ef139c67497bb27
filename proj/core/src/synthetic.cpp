#include "slowkill/synthetic.hpp"

#include <cmath>

#include "slowkill/rng.hpp"

namespace slowkill {

void SyntheticSpec::validate() const {
  if (n < 1 || p < 2 || s < 1) throw std::invalid_argument("synthetic: need n >= 1, p >= 2, s >= 1");
  if (!(tau >= 0 && tau < 1)) throw std::invalid_argument("synthetic: tau must be in [0, 1)");
  if (sigma < 0) throw std::invalid_argument("synthetic: sigma must be >= 0");
  if (beta_star) {
    if (beta_star->size() != p) throw DimensionError("synthetic: beta_star size != p");
  } else if (10 * (s - 1) + 1 > p) {
    throw std::invalid_argument("synthetic: default signal layout needs 10(s-1)+1 <= p");
  }
}

Eigen::VectorXd SyntheticSpec::effective_beta() const {
  return beta_star ? *beta_star : true_beta(p, s, signal);
}

Eigen::MatrixXd gen_design(const SyntheticSpec& spec) {
  spec.validate();
  if (spec.cov == CovKind::EqualCorrelation && spec.tau > 0 && spec.tau >= 1.0)
    throw std::invalid_argument("synthetic: equal-correlation covariance not positive definite");

  Eigen::MatrixXd x(spec.n, spec.p);
  const double tau = spec.cov == CovKind::Identity ? 0.0 : spec.tau;
  for (Index i = 0; i < spec.n; ++i) {
    auto eng = make_engine(derive_seed(spec.seed, streams::kDesignRow, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> nd;
    switch (spec.cov) {
      case CovKind::Identity:
        for (Index j = 0; j < spec.p; ++j) x(i, j) = nd(eng);
        break;
      case CovKind::Toeplitz: {
        // AR(1) recursion: exactly the Cholesky factor of [tau^|i-j|] in action
        double prev = nd(eng);
        x(i, 0) = prev;
        const double w = std::sqrt(1.0 - tau * tau);
        for (Index j = 1; j < spec.p; ++j) {
          prev = tau * prev + w * nd(eng);
          x(i, j) = prev;
        }
        break;
      }
      case CovKind::EqualCorrelation: {
        // rank-one-plus-diagonal square root: sqrt(tau) g 1 + sqrt(1-tau) z
        double shared = std::sqrt(tau) * nd(eng);
        const double w = std::sqrt(1.0 - tau);
        for (Index j = 0; j < spec.p; ++j) x(i, j) = shared + w * nd(eng);
        break;
      }
    }
  }
  return x;
}

Eigen::VectorXd true_beta(Index p, Index s, double magnitude) {
  if (s < 1 || 10 * (s - 1) + 1 > p)
    throw std::invalid_argument("true_beta: layout needs 10(s-1)+1 <= p");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (Index k = 0; k < s; ++k) b[10 * k] = magnitude;
  return b;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_star,
                             ResponseModel model, double sigma, std::uint64_t seed) {
  check_dims(x.cols() == beta_star.size(), "gen_response: design and beta sizes differ");
  Eigen::VectorXd mu = x * beta_star;
  if (model == ResponseModel::ClassificationThreshold) {
    Eigen::VectorXd y(x.rows());
    for (Index i = 0; i < y.size(); ++i) y[i] = mu[i] > 0 ? 1.0 : 0.0;
    return y;
  }
  auto eng = make_engine(derive_seed(seed, streams::kNoise));
  std::normal_distribution<double> nd;
  for (Index i = 0; i < mu.size(); ++i) mu[i] += sigma * nd(eng);
  return mu;
}

}  // namespace slowkill
