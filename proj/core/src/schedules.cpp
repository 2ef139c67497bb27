#include "slowkill/schedules.hpp"

#include <cmath>
#include <random>

#include "engine.hpp"

namespace slowkill {

Index inverse_cooling(Index p, Index q, int T, int t) {
  if (q < 1 || p <= 2 * q)
    throw std::invalid_argument("inverse_cooling: requires 1 <= q and p > 2q");
  if (T < 1 || t < 0 || t > T) throw std::invalid_argument("inverse_cooling: t outside [0, T]");
  double denom = static_cast<double>(t) * T / static_cast<double>(p - q) +
                 2.0 * T / static_cast<double>(p - 2 * q);
  double val = static_cast<double>(q) + static_cast<double>(T - t) / denom;
  return std::clamp(static_cast<Index>(std::floor(val)), q, p);
}

Index sigmoidal_cooling(Index p, Index q, int T, int t, double a, double b, double c) {
  if (q < 1 || q > p) throw std::invalid_argument("sigmoidal_cooling: q outside [1, p]");
  if (!(a > 0 && b > 0 && c > 0))
    throw std::invalid_argument("sigmoidal_cooling: shape parameters must be positive");
  if (T < 1 || t < 0) throw std::invalid_argument("sigmoidal_cooling: bad step index");
  if (t >= T) return q;  // terminal step is pinned to the target
  double val = static_cast<double>(q) +
               static_cast<double>(p - q) *
                   std::pow(1.0 + a * std::exp(b * static_cast<double>(t) / T), -c);
  return std::clamp(static_cast<Index>(std::floor(val)), q, p);
}

Index scheduled_q(const ScheduleSpec& spec, Index p, int t) {
  if (t < 1) throw std::invalid_argument("scheduled_q: iterate index starts at 1");
  switch (spec.kind) {
    case ScheduleKind::Constant:
      return spec.target_q;
    case ScheduleKind::Inverse:
      if (p <= 2 * spec.target_q) return spec.target_q;  // fall back to constant
      if (t - 1 >= spec.T) return spec.target_q;
      return inverse_cooling(p, spec.target_q, spec.T, t - 1);
    case ScheduleKind::Sigmoidal:
      return sigmoidal_cooling(p, spec.target_q, spec.T, t, spec.sigmoid_a, spec.sigmoid_b,
                               spec.sigmoid_c);
  }
  throw std::logic_error("scheduled_q: unknown schedule kind");
}

double sbar(Index q, Index n, Index p, double lipschitz) {
  if (q < 1 || n < 1 || p < 1 || lipschitz <= 0)
    throw std::invalid_argument("sbar: arguments must be positive");
  double cap = static_cast<double>(n) * lipschitz * lipschitz /
               (1.0 + std::log(static_cast<double>(p)));
  return std::min(static_cast<double>(q), cap);
}

double eta_bar(Index q_plus, double rho_plus, const ShrinkagePlan& plan) {
  if (q_plus < 1 || rho_plus <= 0)
    throw std::invalid_argument("eta_bar: q_plus >= 1 and rho_plus > 0 required");
  double ridge = plan.eta0 / rho_plus;
  if (q_plus <= 2 * plan.q) return ridge;
  double sb = sbar(plan.q, plan.n, plan.p, plan.lipschitz);
  double early = 1.0 / (2.0 * std::sqrt(static_cast<double>(q_plus) / sb) - 1.0);
  if (2 * plan.q >= plan.n) return early;  // q >= n/2: the ridge branch has no say yet
  return std::min(ridge, early);
}

namespace {

template <class Mat>
double spectral_impl(const Mat& x, int iters) {
  using Scalar = typename Mat::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (x.rows() == 0 || x.cols() == 0) return 0.0;
  std::mt19937_64 eng(0x5eedb01dcafef00dULL);  // fixed start; results stay deterministic
  std::normal_distribution<double> nd;
  Vec v(x.cols());
  for (Index i = 0; i < v.size(); ++i) {
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
      v[i] = Scalar(nd(eng), nd(eng));
    else
      v[i] = nd(eng);
  }
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vec w = x.adjoint() * (x * v);
    double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lam = norm;  // Rayleigh quotient of the unit iterate
    v = w / norm;
  }
  return lam;
}

}  // namespace

double spectral_norm_sq(const Eigen::MatrixXd& x, int iters) { return spectral_impl(x, iters); }
double spectral_norm_sq(const Eigen::MatrixXcd& x, int iters) { return spectral_impl(x, iters); }

LineSearchResult line_search(LossKind loss, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& beta_prev, Index q_next, double eta_bar_next,
                             double rho_start, double alpha, int max_moves,
                             const ThresholdPolicy& policy) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("line_search: alpha must be in (0,1)");
  if (max_moves < 1) throw std::invalid_argument("line_search: max_moves must be >= 1");
  if (rho_start <= 0) throw std::invalid_argument("line_search: rho_start must be positive");
  check_dims(x.rows() == y.size() && x.cols() == beta_prev.size(),
             "line_search: design/response/coefficient shapes disagree");

  detail::RealModel m;
  m.loss = loss;
  m.x_ext = &x;
  m.y = &y;
  m.policy = policy;
  auto out = detail::line_search_kernel(
      m, beta_prev, q_next, [&](double) { return eta_bar_next; }, rho_start, alpha, max_moves);
  return LineSearchResult{out.rho, std::move(out.beta), out.warned, out.moves};
}

}  // namespace slowkill
