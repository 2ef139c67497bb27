#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>

#include "slowkill/schedules.hpp"

namespace slowkill {

// The main loop: thresholded gradient steps with a cooling cardinality
// schedule, adaptive shrinkage, line-searched rates, optional design
// squeezing, and a final restricted polish/refit.

struct Problem {
  Eigen::MatrixXd X;  // n x p design
  Eigen::VectorXd y;  // response; entries in {0,1} for logistic
  LossKind loss = LossKind::Quadratic;
  bool add_intercept = false;  // prepend a protected ones column internally

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  void validate() const;
};

struct SolverConfig {
  Index q = 1;         // target cardinality
  double eta0 = 0.0;   // target l2 shrinkage
  ScheduleSpec schedule{};
  double alpha = 0.5;  // line-search shrink factor
  int max_search = 5;  // line-search moves per step
  bool squeeze = true;
  int k0 = 1;          // first halving level that triggers squeezing
  double polish_tol = 1e-8;
  int polish_max_iter = 500;
  bool refit = false;
  double refit_ridge = 1e-8;
  int max_constant_iter = 500;     // cap on the constant-q stretch
  int stable_supports_to_stop = 3; // consecutive unchanged supports before polish
  std::optional<double> fixed_rho; // bypass line search (ablations / baselines)
  std::optional<Eigen::VectorXd> beta0;  // warm start, original indexing

  void validate(Index n, Index p) const;
};

template <class Coef>
struct SolverStateT {
  Coef beta;                  // coefficients over active columns
  std::vector<Index> active;  // active column -> original column (-1 = intercept)
  Index t = 0;                // completed iterations
  double rho = 0.0;           // last accepted inverse learning rate
  Index q_t = 0;
  double eta_bar_t = 0.0;
  std::vector<double> objective_trace;  // f(beta^(t)) after each step
  std::vector<double> rho_trace;
  std::vector<Index> q_trace;
  int line_search_warnings = 0;
  int stable_supports = 0;
};

using SolverState = SolverStateT<Eigen::VectorXd>;
using MmvSolverState = SolverStateT<Eigen::MatrixXcd>;

struct FitResult {
  Eigen::VectorXd beta;        // p-vector, original indexing
  double intercept = 0.0;
  std::vector<Index> support;  // sorted original indices of nonzeros
  std::vector<double> objective_trace;
  std::vector<double> rho_trace;
  std::vector<Index> q_trace;
  double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
  double rho_final = 0.0;
  double eta_bar_final = 0.0;
  int line_search_warnings = 0;
  bool refit_fallback = false;  // rank-deficient refit solved by minimum-norm LS
  int iterations = 0;
  double wall_time_s = 0.0;
  Eigen::VectorXd fitted;  // fitted values of the (possibly squeezed) run
};

struct MmvFitResult {
  Eigen::MatrixXcd coef;  // p x m, original row indexing
  std::vector<Index> support;
  std::vector<double> objective_trace;
  std::vector<double> rho_trace;
  std::vector<Index> q_trace;
  double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();
  double rho_final = 0.0;
  double eta_bar_final = 0.0;
  int line_search_warnings = 0;
  bool refit_fallback = false;
  int iterations = 0;
  double wall_time_s = 0.0;
  Eigen::MatrixXcd fitted;
};

namespace detail {
class RealEngine;
}

/// Step-wise driver, used by fit() and by instrumented runs.
class Solver {
 public:
  Solver(const Problem& problem, const SolverConfig& config);
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;

  const SolverState& state() const;
  bool done() const;
  void step();
  void squeeze();  // shrink the active set to the current support
  Eigen::VectorXd beta_full() const;  // mapped back to original indexing
  double intercept() const;
  FitResult finish();  // polish (+ optional refit) and package the result

 private:
  std::unique_ptr<detail::RealEngine> impl_;
};

FitResult fit(const Problem& problem, const SolverConfig& config);

/// Plain iterative hard thresholding: constant schedule, eta0 = 0, no
/// squeezing; otherwise identical semantics to fit().
FitResult iht_baseline(const Problem& problem, Index q, int max_iter);

/// || beta - Theta#(beta - grad/rho; q, eta_bar) ||_inf on the full problem.
double fixed_point_residual(const Problem& problem, const Eigen::VectorXd& beta, double rho,
                            Index q, double eta_bar, double intercept = 0.0);

/// Minimizes the loss plus (eta0/2)||.||^2 restricted to the support of
/// beta, by line-searched gradient steps; the support never changes.
Eigen::VectorXd polish(const Problem& problem, const Eigen::VectorXd& beta,
                       const SolverConfig& config, double intercept = 0.0,
                       double* intercept_out = nullptr);

struct RefitResult {
  Eigen::VectorXd beta;  // original indexing, zero off support
  double intercept = 0.0;
  bool fallback_min_norm = false;
};

/// Near-unpenalized restricted fit on the given support (ridge is a tiny
/// stabilizer). Rank-deficient quadratic designs fall back to the
/// minimum-norm least-squares solution, flagged.
RefitResult refit(const Problem& problem, std::span<const Index> support, double ridge);

// Complex multiple-measurement-vector path: Y = X B + E with joint row
// sparsity, Hermitian inner products throughout.
struct MmvProblem {
  Eigen::MatrixXcd X;  // n x p
  Eigen::MatrixXcd Y;  // n x m
  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  Index m() const { return Y.cols(); }
  void validate() const;
};

MmvFitResult fit(const MmvProblem& problem, const SolverConfig& config);

double fixed_point_residual(const MmvProblem& problem, const Eigen::MatrixXcd& coef, double rho,
                            Index q, double eta_bar);

}  // namespace slowkill
