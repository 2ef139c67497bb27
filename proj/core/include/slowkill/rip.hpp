#pragma once

#include <cstdint>
#include <span>

#include "slowkill/common.hpp"

namespace slowkill {

// Restricted-isometry estimation by random subset sampling: eigenvalue
// extremes of s-column Gram blocks. The estimates are inner bounds,
// rho_minus_hat >= rho_minus(s) and rho_plus_hat <= rho_plus(s).

struct RipEstimate {
  double rho_minus = 0.0;
  double rho_plus = 0.0;
};

/// Subset sampler over one design. Precomputes the full Gram matrix when it
/// fits comfortably in memory so repeated calls only index into it; falls
/// back to per-sample Gram blocks otherwise. Enumerates all C(p, s) subsets
/// whenever there are no more of them than requested samples.
class RipEstimator {
 public:
  explicit RipEstimator(const Eigen::MatrixXd& x);
  RipEstimate estimate(Index s, int num_samples, std::uint64_t seed) const;

 private:
  const Eigen::MatrixXd& x_;
  Eigen::MatrixXd gram_;
  bool have_gram_ = false;
};

RipEstimate estimate_rip(const Eigen::MatrixXd& x, Index s, int num_samples, std::uint64_t seed);

struct RipCurvePoint {
  double theta = 0.0;
  double mean_ratio = 0.0;
  double stderr_ratio = 0.0;
};

/// Mean of 4 theta rho_minus^2(q+s) / rho_plus^2(2q) with q = theta*s over
/// `reps` independent Toeplitz designs, per grid value.
std::vector<RipCurvePoint> rip_ratio_curve(Index n, Index p, Index s, double tau,
                                           std::span<const double> theta_grid, int samples,
                                           int reps, std::uint64_t seed, int threads = 1);

}  // namespace slowkill
