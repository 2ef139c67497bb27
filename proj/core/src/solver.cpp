#include "slowkill/solver.hpp"

#include <chrono>

#include "engine.hpp"

namespace slowkill {

void Problem::validate() const {
  check_dims(X.rows() == y.size(), "problem: X rows and y length differ");
  if (n() < 1 || p() < 2) throw std::invalid_argument("problem: need n >= 1 and p >= 2");
  if (loss == LossKind::ComplexQuadraticMmv)
    throw std::invalid_argument("problem: complex MMV uses MmvProblem");
  if (loss == LossKind::Logistic) {
    for (Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw std::invalid_argument("problem: logistic response must be 0/1");
  }
}

void SolverConfig::validate(Index n, Index p) const {
  (void)n;
  if (q < 1 || q >= p) throw std::invalid_argument("config: need 1 <= q < p");
  if (eta0 < 0) throw std::invalid_argument("config: eta0 must be >= 0");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("config: alpha must be in (0,1)");
  if (max_search < 1) throw std::invalid_argument("config: max_search must be >= 1");
  if (schedule.T < 1) throw std::invalid_argument("config: schedule.T must be >= 1");
  if (polish_tol <= 0 || refit_ridge < 0)
    throw std::invalid_argument("config: tolerances must be positive");
  if (polish_max_iter < 0 || max_constant_iter < 1 || stable_supports_to_stop < 1)
    throw std::invalid_argument("config: iteration limits must be positive");
  if (fixed_rho && *fixed_rho <= 0)
    throw std::invalid_argument("config: fixed_rho must be positive");
}

void MmvProblem::validate() const {
  check_dims(X.rows() == Y.rows(), "mmv problem: X and Y row counts differ");
  if (n() < 1 || p() < 2 || m() < 1)
    throw std::invalid_argument("mmv problem: need n >= 1, p >= 2, m >= 1");
}

Solver::Solver(const Problem& problem, const SolverConfig& config) {
  problem.validate();
  config.validate(problem.n(), problem.p());
  impl_ = std::make_unique<detail::RealEngine>(problem, config);
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

const SolverState& Solver::state() const { return impl_->engine.state(); }
bool Solver::done() const { return impl_->engine.done(); }
void Solver::step() { impl_->engine.step(); }
void Solver::squeeze() { impl_->engine.squeeze(); }

Eigen::VectorXd Solver::beta_full() const {
  const auto& st = impl_->engine.state();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(impl_->problem.p());
  for (Index j = 0; j < st.beta.size(); ++j) {
    Index orig = st.active[static_cast<size_t>(j)];
    if (orig >= 0) out[orig] = st.beta[j];
  }
  return out;
}

double Solver::intercept() const {
  const auto& st = impl_->engine.state();
  for (Index j = 0; j < st.beta.size(); ++j)
    if (st.active[static_cast<size_t>(j)] < 0) return st.beta[j];
  return 0.0;
}

FitResult Solver::finish() {
  auto& eng = impl_->engine;
  const SolverConfig& cfg = eng.config();

  // Polish the stabilized support, then verify the thresholded-gradient
  // fixed-point equation; if the polished point is not a fixed point of the
  // update map, keep iterating. Termination is the fixed point (or the
  // iteration cap).
  for (int round = 0; round < 64; ++round) {
    eng.polish(cfg.eta0);
    if (eng.fixed_point_residual_active(cfg.eta0) <= cfg.polish_tol) break;
    if (eng.at_iteration_cap()) break;
    eng.reset_stability();
    while (!eng.done()) eng.step();
  }
  bool fallback = false;
  if (cfg.refit) {
    auto pol = eng.polish(cfg.refit_ridge);
    if (!pol.converged) {
      bool rank_deficient = false;
      if (eng.direct_restricted_solve(rank_deficient)) fallback = rank_deficient;
    }
  }

  FitResult out;
  out.beta = beta_full();
  out.intercept = intercept();
  out.support = support_of(out.beta);
  const auto& st = eng.state();
  out.objective_trace = st.objective_trace;
  out.rho_trace = st.rho_trace;
  out.q_trace = st.q_trace;
  out.line_search_warnings = st.line_search_warnings;
  out.iterations = static_cast<int>(st.t);
  out.refit_fallback = fallback;
  out.rho_final = st.rho;
  double eta_eff = cfg.refit ? cfg.refit_ridge : cfg.eta0;
  out.eta_bar_final = eta_eff / st.rho;
  out.fitted = eng.fitted();
  out.fixed_point_residual = fixed_point_residual(impl_->problem, out.beta, st.rho, cfg.q,
                                                  out.eta_bar_final, out.intercept);
  return out;
}

FitResult fit(const Problem& problem, const SolverConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  Solver solver(problem, config);
  while (!solver.done()) solver.step();
  FitResult out = solver.finish();
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

FitResult iht_baseline(const Problem& problem, Index q, int max_iter) {
  SolverConfig cfg;
  cfg.q = q;
  cfg.eta0 = 0.0;
  cfg.schedule.kind = ScheduleKind::Constant;
  cfg.squeeze = false;
  cfg.max_constant_iter = max_iter;
  return fit(problem, cfg);
}

double fixed_point_residual(const Problem& problem, const Eigen::VectorXd& beta, double rho,
                            Index q, double eta_bar_value, double intercept) {
  problem.validate();
  check_dims(beta.size() == problem.p(), "fixed_point_residual: beta size mismatch");
  if (rho <= 0) throw std::invalid_argument("fixed_point_residual: rho must be positive");

  detail::RealModel m;
  m.loss = problem.loss;
  m.y = &problem.y;
  Eigen::VectorXd work;
  Eigen::MatrixXd xi;
  if (problem.add_intercept) {
    xi.resize(problem.n(), problem.p() + 1);
    xi.col(0).setOnes();
    xi.rightCols(problem.p()) = problem.X;
    m.x_ext = &xi;
    m.policy.protected_indices = {0};
    work.resize(problem.p() + 1);
    work[0] = intercept;
    work.tail(problem.p()) = beta;
  } else {
    m.x_ext = &problem.X;
    work = beta;
  }
  Eigen::VectorXd grad = m.adjoint(m.dl0(m.apply(work)));
  Eigen::VectorXd thr = m.threshold(work - grad / rho, q, eta_bar_value);
  return (work - thr).cwiseAbs().maxCoeff();
}

Eigen::VectorXd polish(const Problem& problem, const Eigen::VectorXd& beta,
                       const SolverConfig& config, double intercept, double* intercept_out) {
  problem.validate();
  check_dims(beta.size() == problem.p(), "polish: beta size mismatch");

  SolverConfig cfg = config;
  cfg.beta0 = beta;
  detail::RealEngine eng(problem, cfg);
  if (problem.add_intercept) {
    auto& st = eng.engine.mutable_state();
    st.beta[0] = intercept;
  }
  eng.engine.polish(config.eta0);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(problem.p());
  const auto& st = eng.engine.state();
  double icpt = 0.0;
  for (Index j = 0; j < st.beta.size(); ++j) {
    Index orig = st.active[static_cast<size_t>(j)];
    if (orig >= 0)
      out[orig] = st.beta[j];
    else
      icpt = st.beta[j];
  }
  if (intercept_out) *intercept_out = icpt;
  return out;
}

RefitResult refit(const Problem& problem, std::span<const Index> support, double ridge) {
  problem.validate();
  for (Index j : support)
    if (j < 0 || j >= problem.p()) throw std::invalid_argument("refit: support index out of range");
  if (static_cast<Index>(support.size()) > problem.n())
    std::fprintf(stderr, "refit: support larger than sample size (%zu > %lld)\n", support.size(),
                 static_cast<long long>(problem.n()));

  // Seed the polish with ones on the support so the restricted engine keeps
  // exactly these columns active.
  SolverConfig cfg;
  cfg.q = std::max<Index>(static_cast<Index>(support.size()), 1);
  cfg.eta0 = ridge;
  detail::RealEngine eng(problem, cfg);
  auto& st = eng.engine.mutable_state();
  Index off = problem.add_intercept ? 1 : 0;
  for (Index j : support) st.beta[off + j] = 1.0;
  auto pol = eng.engine.polish(ridge);

  RefitResult out;
  bool rank_deficient = false;
  if (!pol.converged && eng.engine.direct_restricted_solve(rank_deficient))
    out.fallback_min_norm = rank_deficient;

  out.beta = Eigen::VectorXd::Zero(problem.p());
  const auto& fst = eng.engine.state();
  for (Index j = 0; j < fst.beta.size(); ++j) {
    Index orig = fst.active[static_cast<size_t>(j)];
    if (orig >= 0)
      out.beta[orig] = fst.beta[j];
    else
      out.intercept = fst.beta[j];
  }
  return out;
}

MmvFitResult fit(const MmvProblem& problem, const SolverConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  problem.validate();
  config.validate(problem.n(), problem.p());

  detail::MmvModel model;
  model.x_ext = &problem.X;
  model.y = &problem.Y;
  std::vector<Index> active(static_cast<size_t>(problem.p()));
  for (Index j = 0; j < problem.p(); ++j) active[static_cast<size_t>(j)] = j;
  detail::Engine<detail::MmvModel> eng(std::move(model), config, problem.p(), std::move(active));

  eng.run();
  for (int round = 0; round < 64; ++round) {
    eng.polish(config.eta0);
    if (eng.fixed_point_residual_active(config.eta0) <= config.polish_tol) break;
    if (eng.at_iteration_cap()) break;
    eng.reset_stability();
    eng.run();
  }
  bool fallback = false;
  if (config.refit) {
    auto pol = eng.polish(config.refit_ridge);
    if (!pol.converged) {
      bool rank_deficient = false;
      if (eng.direct_restricted_solve(rank_deficient)) fallback = rank_deficient;
    }
  }

  MmvFitResult out;
  const auto& st = eng.state();
  out.coef = Eigen::MatrixXcd::Zero(problem.p(), problem.m());
  for (Index j = 0; j < st.beta.rows(); ++j) {
    Index orig = st.active[static_cast<size_t>(j)];
    if (orig >= 0) out.coef.row(orig) = st.beta.row(j);
  }
  out.support = row_support_of(out.coef);
  out.objective_trace = st.objective_trace;
  out.rho_trace = st.rho_trace;
  out.q_trace = st.q_trace;
  out.line_search_warnings = st.line_search_warnings;
  out.iterations = static_cast<int>(st.t);
  out.refit_fallback = fallback;
  out.rho_final = st.rho;
  double eta_eff = config.refit ? config.refit_ridge : config.eta0;
  out.eta_bar_final = eta_eff / st.rho;
  out.fitted = eng.fitted();
  out.fixed_point_residual =
      fixed_point_residual(problem, out.coef, st.rho, config.q, out.eta_bar_final);
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double fixed_point_residual(const MmvProblem& problem, const Eigen::MatrixXcd& coef, double rho,
                            Index q, double eta_bar_value) {
  problem.validate();
  check_dims(coef.rows() == problem.p() && coef.cols() == problem.m(),
             "fixed_point_residual: coefficient shape mismatch");
  if (rho <= 0) throw std::invalid_argument("fixed_point_residual: rho must be positive");
  detail::MmvModel m;
  m.x_ext = &problem.X;
  m.y = &problem.Y;
  Eigen::MatrixXcd grad = m.adjoint(m.dl0(m.apply(coef)));
  Eigen::MatrixXcd thr = m.threshold(coef - grad / rho, q, eta_bar_value);
  return (coef - thr).cwiseAbs().maxCoeff();
}

}  // namespace slowkill
