#pragma once

#include "slowkill/common.hpp"

namespace slowkill {

// Quantile thresholding keeps the q entries (rows) of largest magnitude
// (Euclidean row norm), scales them by 1/(1 + eta_bar), and zeroes the rest.
// Protected coordinates pass through untouched and do not count toward q.

enum class TieMode {
  LowestIndexWins,  // deterministic: ties at the q-th magnitude keep the lower index
  StrictError       // throw TieAtQuantile instead (uniqueness-assumption checking)
};

/// Raised under TieMode::StrictError when |s_(q)| == |s_(q+1)| != 0.
struct TieAtQuantile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ThresholdPolicy {
  TieMode tie_mode = TieMode::LowestIndexWins;
  std::vector<Index> protected_indices;  // exempt from selection and shrinkage
};

Eigen::VectorXd quantile_threshold(const Eigen::VectorXd& s, Index q, double eta_bar,
                                   const ThresholdPolicy& policy = {});

/// Row-group variant: rows are ranked by their l2 norm.
Eigen::MatrixXd group_quantile_threshold(const Eigen::MatrixXd& s, Index q, double eta_bar,
                                         const ThresholdPolicy& policy = {});
Eigen::MatrixXcd group_quantile_threshold(const Eigen::MatrixXcd& s, Index q, double eta_bar,
                                          const ThresholdPolicy& policy = {});

}  // namespace slowkill
