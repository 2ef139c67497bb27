#pragma once

#include <cstdint>
#include <optional>

#include "slowkill/common.hpp"

namespace slowkill {

// Synthetic benchmark scenarios: rows of X are i.i.d. N(0, Sigma) with a
// Toeplitz [tau^|i-j|] or equal-correlation [tau 1_{i!=j}] covariance, and
// the signal puts `signal` at every tenth coordinate.

enum class CovKind { Toeplitz, EqualCorrelation, Identity };
enum class ResponseModel { RegressionGaussianNoise, ClassificationThreshold };

struct SyntheticSpec {
  Index n = 0, p = 0, s = 1;
  double tau = 0.0;
  CovKind cov = CovKind::Toeplitz;
  ResponseModel model = ResponseModel::RegressionGaussianNoise;
  double sigma = 1.0;   // regression noise scale
  double signal = 1.0;  // nonzero coefficient magnitude
  std::optional<Eigen::VectorXd> beta_star;  // explicit override
  std::uint64_t seed = 0;

  void validate() const;
  Eigen::VectorXd effective_beta() const;  // beta_star if set, else the default layout
};

/// Rows i.i.d. N(0, Sigma); each row draws from a stream keyed by
/// (seed, row), so generation parallelizes without changing results.
Eigen::MatrixXd gen_design(const SyntheticSpec& spec);

/// Nonzeros of the given magnitude at 1-based positions 1, 11, ..., 10(s-1)+1.
Eigen::VectorXd true_beta(Index p, Index s, double magnitude = 1.0);

/// Regression adds N(0, sigma^2) noise; classification thresholds the
/// noiseless linear predictor at zero.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_star,
                             ResponseModel model, double sigma, std::uint64_t seed);

}  // namespace slowkill
