#pragma once

// Private solver engine. One templated loop drives both the real
// single-response path and the complex multi-response path; the Model types
// below provide the loss, adjoint, thresholding and inner-product glue.

#include <algorithm>
#include <cmath>
#include <utility>

#include "slowkill/solver.hpp"

namespace slowkill::detail {

struct RealModel {
  using Coef = Eigen::VectorXd;
  using Fitted = Eigen::VectorXd;

  Eigen::MatrixXd x_own;                    // owned active design (after squeezing)
  const Eigen::MatrixXd* x_ext = nullptr;   // borrowed design until first squeeze
  const Eigen::VectorXd* y = nullptr;
  LossKind loss = LossKind::Quadratic;
  ThresholdPolicy policy;

  const Eigen::MatrixXd& design() const { return x_ext ? *x_ext : x_own; }
  Index rows() const { return design().rows(); }
  Index cols() const { return design().cols(); }
  double lipschitz() const { return LossSpec{loss}.lipschitz(); }
  Coef zero() const { return Coef::Zero(cols()); }

  Fitted apply(const Coef& b) const {
    Index nnz = 0;
    for (Index i = 0; i < b.size(); ++i)
      if (b[i] != 0.0) ++nnz;
    if (4 * nnz >= cols()) return design() * b;
    Fitted out = Fitted::Zero(rows());
    for (Index i = 0; i < b.size(); ++i)
      if (b[i] != 0.0) out.noalias() += b[i] * design().col(i);
    return out;
  }
  double l0(const Fitted& xb) const { return loss_value(loss, xb, *y); }
  Fitted dl0(const Fitted& xb) const { return loss_gradient(loss, xb, *y); }
  Coef adjoint(const Fitted& v) const { return design().transpose() * v; }
  double inner(const Fitted& a, const Fitted& b) const { return a.dot(b); }
  Coef threshold(const Coef& s, Index q, double eta) const {
    return quantile_threshold(s, q, eta, policy);
  }
  std::vector<Index> support(const Coef& b) const { return support_of(b); }
  static double row_sqnorm(const Coef& b, Index i) { return b[i] * b[i]; }

  void keep_columns(const std::vector<Index>& keep) {
    Eigen::MatrixXd xn(rows(), static_cast<Index>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) xn.col(static_cast<Index>(j)) = design().col(keep[j]);
    x_own.swap(xn);
    x_ext = nullptr;
  }

  // Direct restricted least squares, used when gradient polishing stalls.
  bool direct_least_squares(Coef& b, bool& rank_deficient) const {
    if (loss != LossKind::Quadratic || cols() == 0) return false;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design());
    b = cod.solve(*y);
    rank_deficient = cod.rank() < cols();
    return true;
  }

  // Classical finisher for the restricted smooth problem, applied when the
  // first-order polish loop runs out of iterations: an exact ridge solve for
  // the quadratic loss, damped Newton for the logistic one. Protected
  // coordinates carry no ridge.
  bool finish_polish(Coef& b, double eta) const {
    if (cols() == 0) return false;
    Eigen::VectorXd ridge = Eigen::VectorXd::Constant(cols(), eta);
    for (Index j : policy.protected_indices) ridge[j] = 0.0;

    if (loss == LossKind::Quadratic) {
      if (eta == 0.0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design());
        b = cod.solve(*y);
        return b.allFinite();
      }
      Eigen::MatrixXd h = design().transpose() * design();
      h.diagonal() += ridge;
      Coef sol = h.ldlt().solve(design().transpose() * *y);
      if (!sol.allFinite()) return false;
      b = std::move(sol);
      return true;
    }

    // logistic: Newton with objective-based step halving
    auto objective = [&](const Coef& v) {
      return loss_value(loss, apply(v), *y) + 0.5 * v.dot(ridge.cwiseProduct(v));
    };
    double f = objective(b);
    for (int it = 0; it < 50; ++it) {
      Eigen::VectorXd xb = apply(b);
      Eigen::VectorXd mu(xb.size());
      Eigen::VectorXd w(xb.size());
      for (Index i = 0; i < xb.size(); ++i) {
        mu[i] = sigmoid(xb[i]);
        w[i] = std::max(mu[i] * (1.0 - mu[i]), 1e-10);
      }
      Coef g = design().transpose() * (mu - *y) + ridge.cwiseProduct(b);
      if (g.cwiseAbs().maxCoeff() <= 1e-12) break;
      Eigen::MatrixXd h = design().transpose() * w.asDiagonal() * design();
      h.diagonal() += ridge;
      h.diagonal().array() += 1e-12;
      Coef delta = h.ldlt().solve(g);
      if (!delta.allFinite()) break;
      double t = 1.0;
      while (t > 1e-10) {
        Coef cand = b - t * delta;
        double fc = objective(cand);
        if (fc <= f + 1e-14 * (1.0 + std::abs(f))) {
          b = std::move(cand);
          f = fc;
          break;
        }
        t *= 0.5;
      }
      if (t <= 1e-10) break;
    }
    return true;
  }
};

struct MmvModel {
  using Coef = Eigen::MatrixXcd;
  using Fitted = Eigen::MatrixXcd;

  Eigen::MatrixXcd x_own;
  const Eigen::MatrixXcd* x_ext = nullptr;
  const Eigen::MatrixXcd* y = nullptr;
  ThresholdPolicy policy;

  const Eigen::MatrixXcd& design() const { return x_ext ? *x_ext : x_own; }
  Index rows() const { return design().rows(); }
  Index cols() const { return design().cols(); }
  static double lipschitz() { return 1.0; }
  Coef zero() const { return Coef::Zero(cols(), y->cols()); }

  Fitted apply(const Coef& b) const {
    Index nnz = 0;
    for (Index i = 0; i < b.rows(); ++i)
      if (b.row(i).squaredNorm() != 0.0) ++nnz;
    if (4 * nnz >= cols()) return design() * b;
    Fitted out = Fitted::Zero(rows(), b.cols());
    for (Index i = 0; i < b.rows(); ++i)
      if (b.row(i).squaredNorm() != 0.0) out.noalias() += design().col(i) * b.row(i);
    return out;
  }
  double l0(const Fitted& xb) const { return mmv_loss_value(xb, *y); }
  Fitted dl0(const Fitted& xb) const { return mmv_loss_gradient(xb, *y); }
  Coef adjoint(const Fitted& v) const { return design().adjoint() * v; }
  double inner(const Fitted& a, const Fitted& b) const {
    return a.conjugate().cwiseProduct(b).sum().real();
  }
  Coef threshold(const Coef& s, Index q, double eta) const {
    return group_quantile_threshold(s, q, eta, policy);
  }
  std::vector<Index> support(const Coef& b) const { return row_support_of(b); }
  static double row_sqnorm(const Coef& b, Index i) { return b.row(i).squaredNorm(); }

  void keep_columns(const std::vector<Index>& keep) {
    Eigen::MatrixXcd xn(rows(), static_cast<Index>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) xn.col(static_cast<Index>(j)) = design().col(keep[j]);
    x_own.swap(xn);
    x_ext = nullptr;
  }

  bool direct_least_squares(Coef& b, bool& rank_deficient) const {
    if (cols() == 0) return false;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(design());
    b = cod.solve(*y);
    rank_deficient = cod.rank() < cols();
    return true;
  }

  bool finish_polish(Coef& b, double eta) const {
    if (cols() == 0) return false;
    if (eta == 0.0) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(design());
      b = cod.solve(*y);
      return b.allFinite();
    }
    Eigen::VectorXd ridge = Eigen::VectorXd::Constant(cols(), eta);
    for (Index j : policy.protected_indices) ridge[j] = 0.0;
    Eigen::MatrixXcd h = design().adjoint() * design();
    h.diagonal() += ridge.cast<std::complex<double>>();
    Coef sol = h.ldlt().solve(design().adjoint() * *y);
    if (!sol.allFinite()) return false;
    b = std::move(sol);
    return true;
  }
};

template <class Model>
struct SearchOutcome {
  double rho = 0.0;
  typename Model::Coef beta;
  typename Model::Fitted fitted;
  double eta_bar = 0.0;
  double gap = 0.0;
  bool warned = false;
  int moves = 0;
};

// Adaptive step-size walk on the grid {rho_start * alpha^k}. eta_of_rho maps
// a trial rho to the shrinkage used inside the thresholding operator, so the
// accepted step always minimizes the surrogate at its own rho.
template <class Model, class EtaFn>
SearchOutcome<Model> line_search_kernel(const Model& m, const typename Model::Coef& beta_prev,
                                        Index q_next, EtaFn&& eta_of_rho, double rho_start,
                                        double alpha, int max_moves) {
  using Coef = typename Model::Coef;
  const auto xb_prev = m.apply(beta_prev);
  const double l_prev = m.l0(xb_prev);
  const auto g0 = m.dl0(xb_prev);
  const Coef grad = m.adjoint(g0);
  if (!grad.allFinite()) throw std::runtime_error("line search: non-finite gradient");

  struct Trial {
    Coef beta;
    typename Model::Fitted fitted;
    double eta = 0.0, gap = 0.0;
    bool ok = false;
  };
  auto evaluate = [&](double rho) {
    Trial t;
    t.eta = eta_of_rho(rho);
    t.beta = m.threshold(beta_prev - grad / rho, q_next, t.eta);
    t.fitted = m.apply(t.beta);
    double breg = m.l0(t.fitted) - l_prev - m.inner(g0, t.fitted - xb_prev);
    double d2 = 0.5 * (t.beta - beta_prev).squaredNorm();
    t.gap = rho * d2 - breg;
    // tolerate rounding noise at the acceptance boundary
    t.ok = t.gap >= -1e-12 * (1.0 + rho * d2 + std::abs(breg));
    return t;
  };

  SearchOutcome<Model> out;
  double rho = rho_start;
  Trial cur = evaluate(rho);
  if (cur.ok) {
    while (out.moves < max_moves) {
      ++out.moves;
      Trial t = evaluate(rho * alpha);
      if (!t.ok) break;
      rho *= alpha;
      cur = std::move(t);
    }
  } else {
    bool accepted = false;
    while (out.moves < max_moves) {
      ++out.moves;
      rho /= alpha;
      cur = evaluate(rho);
      if (cur.ok) {
        accepted = true;
        break;
      }
    }
    out.warned = !accepted;
  }
  out.rho = rho;
  out.beta = std::move(cur.beta);
  out.fitted = std::move(cur.fitted);
  out.eta_bar = cur.eta;
  out.gap = cur.gap;
  return out;
}

struct PolishOutcome {
  bool converged = false;
  int iterations = 0;
};

template <class Model>
class Engine {
 public:
  using Coef = typename Model::Coef;
  using State = SolverStateT<Coef>;

  Engine(Model model, const SolverConfig& config, Index p_schedule, std::vector<Index> active)
      : m_(std::move(model)), cfg_(config), p_sched_(p_schedule) {
    sched_ = cfg_.schedule;
    sched_.target_q = cfg_.q;
    if (sched_.kind == ScheduleKind::Inverse && p_sched_ <= 2 * cfg_.q)
      sched_.kind = ScheduleKind::Constant;
    cooling_steps_ = sched_.kind == ScheduleKind::Constant ? 0 : sched_.T;
    plan_ = ShrinkagePlan{cfg_.eta0, m_.lipschitz(), m_.rows(), p_sched_, cfg_.q};
    st_.active = std::move(active);
    st_.beta = m_.zero();
    st_.rho = cfg_.fixed_rho
                  ? *cfg_.fixed_rho
                  : std::max(m_.lipschitz() * spectral_norm_sq(m_.design()), 1e-12);
    next_k_ = cfg_.k0;
  }

  const State& state() const { return st_; }
  const Model& model() const { return m_; }
  const SolverConfig& config() const { return cfg_; }

  Index protected_count() const { return static_cast<Index>(m_.policy.protected_indices.size()); }
  Index candidates() const { return m_.cols() - protected_count(); }

  bool done() const {
    Index target_now = std::min<Index>(cfg_.q, candidates());
    if (st_.t >= 1 && st_.q_t == target_now &&
        st_.stable_supports >= cfg_.stable_supports_to_stop)
      return true;
    return st_.t >= cooling_steps_ + cfg_.max_constant_iter;
  }

  void step() {
    const int t_next = static_cast<int>(st_.t) + 1;
    Index q_next = std::min<Index>(scheduled_q(sched_, p_sched_, t_next), candidates());
    auto eta_fn = [&](double rho) { return eta_bar(std::max<Index>(q_next, 1), rho, plan_); };

    SearchOutcome<Model> out;
    if (cfg_.fixed_rho) {
      out = line_search_kernel(m_, st_.beta, q_next, eta_fn, *cfg_.fixed_rho, cfg_.alpha, 0);
      out.warned = false;  // fixed-rate mode never searches
    } else {
      out = line_search_kernel(m_, st_.beta, q_next, eta_fn, st_.rho, cfg_.alpha, cfg_.max_search);
      if (out.warned) ++st_.line_search_warnings;
    }

    st_.beta = std::move(out.beta);
    st_.rho = out.rho;
    st_.q_t = q_next;
    st_.eta_bar_t = out.eta_bar;
    ++st_.t;
    st_.objective_trace.push_back(objective_from(out.fitted));
    st_.rho_trace.push_back(out.rho);
    st_.q_trace.push_back(q_next);

    auto supp = support_original();
    if (q_next == std::min<Index>(cfg_.q, candidates())) {
      if (supp == prev_support_)
        ++st_.stable_supports;
      else
        st_.stable_supports = 0;
    } else {
      st_.stable_supports = 0;
    }
    prev_support_ = std::move(supp);

    if (cfg_.squeeze && sched_.kind != ScheduleKind::Constant) {
      bool trigger = false;
      while (next_k_ < 60 &&
             static_cast<double>(q_next) <= std::ldexp(static_cast<double>(p_sched_), -next_k_)) {
        trigger = true;
        ++next_k_;
      }
      if (trigger) squeeze();
    }
  }

  void run() {
    while (!done()) step();
  }

  /// Shrinks the active set to the current support plus protected columns.
  void squeeze() {
    std::vector<Index> keep;
    for (Index j = 0; j < m_.cols(); ++j)
      if (st_.active[static_cast<size_t>(j)] < 0 || m_.row_sqnorm(st_.beta, j) != 0.0)
        keep.push_back(j);
    if (static_cast<Index>(keep.size()) == m_.cols()) return;

    Coef nb = pick_rows(st_.beta, keep);
    std::vector<Index> na(keep.size());
    std::vector<Index> nprot;
    for (size_t j = 0; j < keep.size(); ++j) {
      na[j] = st_.active[static_cast<size_t>(keep[j])];
      if (na[j] < 0) nprot.push_back(static_cast<Index>(j));
    }
    m_.keep_columns(keep);
    m_.policy.protected_indices = std::move(nprot);
    st_.beta = std::move(nb);
    st_.active = std::move(na);
  }

  /// Line-searched gradient descent on the support (selection is a no-op at
  /// q = |active|), minimizing the loss plus (eta_eff/2)||.||^2. If the
  /// first-order loop exhausts its budget, the loss's classical finisher
  /// (direct ridge solve / Newton) completes the job.
  PolishOutcome polish(double eta_eff) {
    squeeze();
    PolishOutcome res;
    if (m_.cols() == 0) {
      res.converged = true;
      return res;
    }
    Index keep_all = candidates();
    for (int it = 0; it < cfg_.polish_max_iter; ++it) {
      if (penalized_grad_norm(eta_eff) <= cfg_.polish_tol) {
        res.converged = true;
        res.iterations = it;
        return res;
      }
      auto out = line_search_kernel(
          m_, st_.beta, keep_all, [&](double rho) { return eta_eff / rho; }, st_.rho, cfg_.alpha,
          cfg_.max_search);
      if (out.warned) ++st_.line_search_warnings;
      st_.beta = std::move(out.beta);
      st_.rho = out.rho;
      st_.eta_bar_t = out.eta_bar;
      res.iterations = it + 1;
    }
    if (m_.finish_polish(st_.beta, eta_eff))
      res.converged = penalized_grad_norm(eta_eff) <= cfg_.polish_tol;
    return res;
  }

  double penalized_grad_norm(double eta_eff) const {
    auto xb = m_.apply(st_.beta);
    Coef g = m_.adjoint(m_.dl0(xb));
    Coef gpen = g + eta_eff * st_.beta;
    for (Index j : m_.policy.protected_indices) gpen.row(j) = g.row(j);
    return gpen.cwiseAbs().maxCoeff();
  }

  /// || beta - Theta#(beta - grad/rho; q, eta_eff/rho) ||_inf on the active
  /// design; zero exactly at a fixed point of the update map.
  double fixed_point_residual_active(double eta_eff) const {
    if (m_.cols() == 0) return 0.0;
    Coef grad = m_.adjoint(m_.dl0(m_.apply(st_.beta)));
    Index q_now = std::min<Index>(cfg_.q, candidates());
    Coef thr = m_.threshold(st_.beta - grad / st_.rho, q_now, eta_eff / st_.rho);
    return (st_.beta - thr).cwiseAbs().maxCoeff();
  }

  bool at_iteration_cap() const { return st_.t >= cooling_steps_ + cfg_.max_constant_iter; }

  /// Forgets support-stability history so stepping can resume after a polish
  /// that did not land on a fixed point.
  void reset_stability() {
    st_.stable_supports = 0;
    prev_support_.clear();
  }

  /// Direct restricted solve; used as the fallback when polishing a refit
  /// stalls. Returns true (and sets the flag) only for quadratic losses.
  bool direct_restricted_solve(bool& rank_deficient) {
    Coef b;
    bool applied = m_.direct_least_squares(b, rank_deficient);
    if (applied) st_.beta = std::move(b);
    return applied;
  }

  std::vector<Index> support_original() const {
    std::vector<Index> s;
    for (Index j = 0; j < m_.cols(); ++j) {
      Index orig = st_.active[static_cast<size_t>(j)];
      if (orig >= 0 && m_.row_sqnorm(st_.beta, j) != 0.0) s.push_back(orig);
    }
    std::sort(s.begin(), s.end());
    return s;
  }

  typename Model::Fitted fitted() const { return m_.apply(st_.beta); }

  double objective() const { return objective_from(fitted()); }

  State& mutable_state() { return st_; }
  Model& mutable_model() { return m_; }

 private:
  double objective_from(const typename Model::Fitted& xb) const {
    double pen = st_.beta.squaredNorm();
    for (Index j : m_.policy.protected_indices) pen -= m_.row_sqnorm(st_.beta, j);
    return m_.l0(xb) + 0.5 * cfg_.eta0 * std::max(pen, 0.0);
  }

  static Eigen::VectorXd pick_rows(const Eigen::VectorXd& b, const std::vector<Index>& keep) {
    Eigen::VectorXd out(static_cast<Index>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) out[static_cast<Index>(j)] = b[keep[j]];
    return out;
  }
  static Eigen::MatrixXcd pick_rows(const Eigen::MatrixXcd& b, const std::vector<Index>& keep) {
    Eigen::MatrixXcd out(static_cast<Index>(keep.size()), b.cols());
    for (size_t j = 0; j < keep.size(); ++j) out.row(static_cast<Index>(j)) = b.row(keep[j]);
    return out;
  }

  Model m_;
  SolverConfig cfg_;
  ScheduleSpec sched_;
  Index p_sched_;
  ShrinkagePlan plan_;
  State st_;
  std::vector<Index> prev_support_;
  int cooling_steps_ = 0;
  int next_k_ = 1;
};

class RealEngine {
 public:
  RealEngine(const Problem& pb, const SolverConfig& cfg)
      : problem(pb), engine(make_model(problem), cfg, pb.p(), make_active(pb)) {
    if (cfg.beta0) {
      const Eigen::VectorXd& b0 = *cfg.beta0;
      check_dims(b0.size() == pb.p(), "beta0 size does not match problem");
      Eigen::VectorXd& beta = engine.mutable_state().beta;
      Index off = pb.add_intercept ? 1 : 0;
      beta.segment(off, pb.p()) = b0;
    }
  }
  RealEngine(const RealEngine&) = delete;
  RealEngine& operator=(const RealEngine&) = delete;

  Problem problem;  // owned copy; the engine's model borrows from it
  Engine<RealModel> engine;

 private:
  static RealModel make_model(const Problem& pb) {
    RealModel m;
    m.loss = pb.loss;
    m.y = &pb.y;
    if (pb.add_intercept) {
      m.x_own.resize(pb.n(), pb.p() + 1);
      m.x_own.col(0).setOnes();
      m.x_own.rightCols(pb.p()) = pb.X;
      m.policy.protected_indices = {0};
    } else {
      m.x_ext = &pb.X;
    }
    return m;
  }
  static std::vector<Index> make_active(const Problem& pb) {
    std::vector<Index> a;
    Index off = pb.add_intercept ? 1 : 0;
    a.reserve(static_cast<size_t>(pb.p() + off));
    if (pb.add_intercept) a.push_back(-1);
    for (Index j = 0; j < pb.p(); ++j) a.push_back(j);
    return a;
  }
};

}  // namespace slowkill::detail
