#include "slowkill/rip.hpp"

#include <cmath>

#include "slowkill/rng.hpp"
#include "slowkill/synthetic.hpp"

namespace slowkill {

namespace {

constexpr Index kGramBudgetDoubles = Index(48) * 1024 * 1024;  // ~384 MB

// C(p, s) capped at `cap` to avoid overflow.
std::uint64_t subset_count_capped(Index p, Index s, std::uint64_t cap) {
  long double c = 1.0L;
  for (Index i = 1; i <= s; ++i) {
    c *= static_cast<long double>(p - s + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(c);
}

}  // namespace

RipEstimator::RipEstimator(const Eigen::MatrixXd& x) : x_(x) {
  if (x.cols() * x.cols() <= kGramBudgetDoubles) {
    gram_.noalias() = x.transpose() * x;
    have_gram_ = true;
  }
}

RipEstimate RipEstimator::estimate(Index s, int num_samples, std::uint64_t seed) const {
  const Index p = x_.cols();
  if (s < 1 || s > p) throw std::invalid_argument("estimate_rip: s outside [1, p]");
  if (num_samples < 1) throw std::invalid_argument("estimate_rip: need at least one sample");

  Eigen::MatrixXd block(s, s);
  auto block_from = [&](const std::vector<Index>& idx) {
    if (have_gram_) {
      for (Index a = 0; a < s; ++a)
        for (Index b = 0; b < s; ++b) block(a, b) = gram_(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
    } else {
      for (Index a = 0; a < s; ++a)
        for (Index b = a; b < s; ++b) {
          double v = x_.col(idx[static_cast<size_t>(a)]).dot(x_.col(idx[static_cast<size_t>(b)]));
          block(a, b) = v;
          block(b, a) = v;
        }
    }
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  auto absorb = [&](const std::vector<Index>& idx) {
    block_from(idx);
    es.compute(block, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  };

  std::uint64_t total = subset_count_capped(p, s, static_cast<std::uint64_t>(num_samples));
  if (total <= static_cast<std::uint64_t>(num_samples)) {
    // exhaustive enumeration in lexicographic order
    std::vector<Index> idx(static_cast<size_t>(s));
    for (Index i = 0; i < s; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
      absorb(idx);
      Index i = s - 1;
      while (i >= 0 && idx[static_cast<size_t>(i)] == p - s + i) --i;
      if (i < 0) break;
      ++idx[static_cast<size_t>(i)];
      for (Index j = i + 1; j < s; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
  } else {
    std::vector<Index> pool(static_cast<size_t>(p));
    std::vector<Index> idx(static_cast<size_t>(s));
    for (int k = 0; k < num_samples; ++k) {
      auto eng = make_engine(derive_seed(seed, streams::kRipSample, static_cast<std::uint64_t>(k)));
      for (Index i = 0; i < p; ++i) pool[static_cast<size_t>(i)] = i;
      for (Index i = 0; i < s; ++i) {  // partial Fisher-Yates
        std::uniform_int_distribution<Index> pick(i, p - 1);
        std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(pick(eng))]);
        idx[static_cast<size_t>(i)] = pool[static_cast<size_t>(i)];
      }
      absorb(idx);
    }
  }
  return RipEstimate{lo, hi};
}

RipEstimate estimate_rip(const Eigen::MatrixXd& x, Index s, int num_samples, std::uint64_t seed) {
  return RipEstimator(x).estimate(s, num_samples, seed);
}

std::vector<RipCurvePoint> rip_ratio_curve(Index n, Index p, Index s, double tau,
                                           std::span<const double> theta_grid, int samples,
                                           int reps, std::uint64_t seed, int threads) {
  if (theta_grid.empty()) throw std::invalid_argument("rip_ratio_curve: empty theta grid");
  if (reps < 1) throw std::invalid_argument("rip_ratio_curve: need reps >= 1");
  for (double theta : theta_grid) {
    Index q = static_cast<Index>(std::llround(theta * static_cast<double>(s)));
    if (q < 1 || 2 * q > p)
      throw std::invalid_argument("rip_ratio_curve: need 1 <= theta*s <= p/2");
  }

  const Index t_count = static_cast<Index>(theta_grid.size());
  Eigen::MatrixXd ratios(reps, t_count);
  parallel_for(threads, reps, [&](Index r) {
    SyntheticSpec spec;
    spec.n = n;
    spec.p = p;
    spec.s = s;
    spec.tau = tau;
    spec.cov = CovKind::Toeplitz;
    spec.seed = derive_seed(seed, streams::kReplicate, static_cast<std::uint64_t>(r));
    Eigen::MatrixXd x = gen_design(spec);
    RipEstimator est(x);
    for (Index t = 0; t < t_count; ++t) {
      double theta = theta_grid[static_cast<size_t>(t)];
      Index q = static_cast<Index>(std::llround(theta * static_cast<double>(s)));
      auto low = est.estimate(q + s, samples, derive_seed(spec.seed, streams::kRipSample, 1));
      auto high = est.estimate(2 * q, samples, derive_seed(spec.seed, streams::kRipSample, 2));
      ratios(r, t) =
          4.0 * theta * low.rho_minus * low.rho_minus / (high.rho_plus * high.rho_plus);
    }
  });

  std::vector<RipCurvePoint> out;
  out.reserve(static_cast<size_t>(t_count));
  for (Index t = 0; t < t_count; ++t) {
    RipCurvePoint pt;
    pt.theta = theta_grid[static_cast<size_t>(t)];
    pt.mean_ratio = ratios.col(t).mean();
    if (reps > 1) {
      double var = (ratios.col(t).array() - pt.mean_ratio).square().sum() / (reps - 1);
      pt.stderr_ratio = std::sqrt(var / reps);
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace slowkill
