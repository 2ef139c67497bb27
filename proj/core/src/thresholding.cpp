#include "slowkill/thresholding.hpp"

#include <algorithm>
#include <numeric>

namespace slowkill {

namespace {

// Shared selection kernel. `score[i]` is the squared magnitude used for
// ranking; `shrink(i)` writes row i scaled by 1/(1+eta), `copy(i)` writes it
// unchanged. Selection uses nth_element, not a full sort.
template <class Derived, class Out>
void threshold_impl(const Eigen::MatrixBase<Derived>& s, Index q, double eta_bar,
                    const ThresholdPolicy& policy, Out& out) {
  const Index p = s.rows();
  std::vector<char> is_protected(static_cast<size_t>(p), 0);
  for (Index j : policy.protected_indices) {
    if (j < 0 || j >= p) throw std::invalid_argument("protected index out of range");
    is_protected[static_cast<size_t>(j)] = 1;
  }
  Index n_protected = static_cast<Index>(
      std::count(is_protected.begin(), is_protected.end(), char(1)));
  if (q < 0 || q > p - n_protected)
    throw std::invalid_argument("quantile_threshold: q out of range");
  if (eta_bar < 0) throw std::invalid_argument("quantile_threshold: eta_bar must be >= 0");

  Eigen::VectorXd score(p);
  for (Index i = 0; i < p; ++i) score[i] = s.row(i).squaredNorm();

  std::vector<Index> idx;
  idx.reserve(static_cast<size_t>(p - n_protected));
  for (Index i = 0; i < p; ++i)
    if (!is_protected[static_cast<size_t>(i)]) idx.push_back(i);

  auto better = [&](Index a, Index b) {
    return score[a] > score[b] || (score[a] == score[b] && a < b);
  };

  const Index m = static_cast<Index>(idx.size());
  Index keep = std::min(q, m);
  if (keep > 0 && keep < m) {
    std::nth_element(idx.begin(), idx.begin() + keep, idx.end(), better);
    if (policy.tie_mode == TieMode::StrictError) {
      double min_kept = score[idx[0]];
      for (Index i = 1; i < keep; ++i) min_kept = std::min(min_kept, score[idx[static_cast<size_t>(i)]]);
      double max_dropped = score[idx[static_cast<size_t>(keep)]];
      for (Index i = keep + 1; i < m; ++i)
        max_dropped = std::max(max_dropped, score[idx[static_cast<size_t>(i)]]);
      if (min_kept == max_dropped && min_kept != 0.0)
        throw TieAtQuantile("quantile_threshold: magnitude tie at the q-th order statistic");
    }
  }

  out.setZero();
  const double scale = 1.0 / (1.0 + eta_bar);
  for (Index i = 0; i < keep; ++i) {
    Index j = idx[static_cast<size_t>(i)];
    if (score[j] == 0.0) continue;  // zero rows carry no signal even if "selected"
    out.row(j) = s.row(j) * scale;
  }
  for (Index j = 0; j < p; ++j)
    if (is_protected[static_cast<size_t>(j)]) out.row(j) = s.row(j);
}

}  // namespace

Eigen::VectorXd quantile_threshold(const Eigen::VectorXd& s, Index q, double eta_bar,
                                   const ThresholdPolicy& policy) {
  Eigen::VectorXd out(s.size());
  threshold_impl(s, q, eta_bar, policy, out);
  return out;
}

Eigen::MatrixXd group_quantile_threshold(const Eigen::MatrixXd& s, Index q, double eta_bar,
                                         const ThresholdPolicy& policy) {
  Eigen::MatrixXd out(s.rows(), s.cols());
  threshold_impl(s, q, eta_bar, policy, out);
  return out;
}

Eigen::MatrixXcd group_quantile_threshold(const Eigen::MatrixXcd& s, Index q, double eta_bar,
                                          const ThresholdPolicy& policy) {
  Eigen::MatrixXcd out(s.rows(), s.cols());
  threshold_impl(s, q, eta_bar, policy, out);
  return out;
}

}  // namespace slowkill
