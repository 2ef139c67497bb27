#pragma once

#include "slowkill/losses.hpp"
#include "slowkill/thresholding.hpp"

namespace slowkill {

// The three sequences driving a run: the cooling cardinality q_t, the scaled
// l2-shrinkage eta_bar_t, and the line-searched inverse learning rate rho_t.

enum class ScheduleKind { Inverse, Sigmoidal, Constant };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Inverse;
  int T = 100;          // cooling steps
  Index target_q = 1;   // terminal cardinality
  double sigmoid_a = 1.0, sigmoid_b = 5.0, sigmoid_c = 1.0;
};

/// q_{t+1} = floor(q + (T-t) / (tT/(p-q) + 2T/(p-2q))), clamped to [q, p],
/// so q_1 = p/2 and q_T = q. Requires p > 2q.
Index inverse_cooling(Index p, Index q, int T, int t);

/// q_t = floor(q + (p-q) * (1 + a*exp(b*t/T))^(-c)), clamped to [q, p];
/// steps at or past T return exactly q.
Index sigmoidal_cooling(Index p, Index q, int T, int t, double a, double b, double c);

/// Cardinality of iterate t (t >= 1) under a schedule. Inverse falls back to
/// Constant when p <= 2 * target_q.
Index scheduled_q(const ScheduleSpec& spec, Index p, int t);

/// sbar = min(q, n L^2 / log(e p)): the computable stand-in for the unknown
/// sparsity used by the shrinkage rule.
double sbar(Index q, Index n, Index p, double lipschitz);

struct ShrinkagePlan {
  double eta0 = 0.0;      // target l2 penalty
  double lipschitz = 1.0; // gradient Lipschitz constant of the loss
  Index n = 0, p = 0, q = 0;
};

/// Scaled shrinkage for a step with upcoming cardinality q_plus and inverse
/// rate rho_plus:
///   1/(2 sqrt(q_plus/sbar) - 1)          if q_plus > 2q and q >= n/2,
///   eta0/rho_plus                        if q_plus <= 2q,
///   min of the two                       otherwise.
double eta_bar(Index q_plus, double rho_plus, const ShrinkagePlan& plan);

/// Largest eigenvalue of X^T X (squared spectral norm), estimated by power
/// iteration from a fixed deterministic start.
double spectral_norm_sq(const Eigen::MatrixXd& x, int iters = 50);
double spectral_norm_sq(const Eigen::MatrixXcd& x, int iters = 50);

struct LineSearchResult {
  double rho = 0.0;
  Eigen::VectorXd beta_next;
  bool warned = false;  // no grid point within max_moves satisfied the criterion
  int moves = 0;
};

/// Adaptive step-size search on the geometric grid {rho_start * alpha^k},
/// warm-started at rho_start. Returns the smallest rho reachable within
/// max_moves whose thresholded gradient step satisfies
/// (rho D2 - Bregman)(beta_next, beta_prev) >= 0, together with that step.
/// If even the largest tried rho fails, returns it with `warned` set.
LineSearchResult line_search(LossKind loss, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta_prev, Index q_next, double eta_bar_next,
                             double rho_start, double alpha, int max_moves,
                             const ThresholdPolicy& policy = {});

}  // namespace slowkill
