#include "slowkill/selection.hpp"

#include <cmath>

namespace slowkill {

double complexity_penalty(Index support_size, Index m, Index p) {
  if (support_size < 0 || support_size > p)
    throw std::invalid_argument("complexity_penalty: support size outside [0, p]");
  if (m < 1 || p < 1) throw std::invalid_argument("complexity_penalty: m, p must be >= 1");
  if (support_size == 0) return 0.0;
  double j = static_cast<double>(support_size);
  return j * static_cast<double>(m) + j * (1.0 + std::log(static_cast<double>(p) / j));
}

double pic_known_scale(double loss_value, Index support_size, Index m, Index p, double a_const) {
  if (a_const < 0) throw std::invalid_argument("pic_known_scale: A must be >= 0");
  return loss_value + a_const * complexity_penalty(support_size, m, p);
}

double pic_scale_free(double rss, Index n, Index m, Index support_size, Index p, double a_const) {
  if (a_const <= 0) throw std::invalid_argument("pic_scale_free: A must be positive");
  if (rss <= 0) throw NonpositiveRss("pic_scale_free: nonpositive RSS (perfect interpolation)");
  double pen = complexity_penalty(support_size, m, p);
  double mn = static_cast<double>(m) * static_cast<double>(n);
  if (a_const * pen >= mn)
    throw InadmissibleModel("pic_scale_free: A P(B) >= mn (delta >= 1)");
  return mn * std::log(rss) + a_const * pen;
}

SelectionResult select_q(const Problem& problem, std::span<const Index> q_grid,
                         const SolverConfig& config_template, const PicSpec& criterion) {
  problem.validate();
  if (q_grid.empty()) throw std::invalid_argument("select_q: empty grid");
  for (size_t i = 0; i < q_grid.size(); ++i) {
    if (q_grid[i] < 1 || q_grid[i] >= problem.p())
      throw std::invalid_argument("select_q: grid values must satisfy 1 <= q < p");
    if (i > 0 && q_grid[i] <= q_grid[i - 1])
      throw std::invalid_argument("select_q: grid must be strictly ascending");
  }

  SelectionResult res;
  res.q_grid.assign(q_grid.begin(), q_grid.end());
  res.entries.reserve(q_grid.size());

  double y_sq = problem.y.squaredNorm();
  for (Index q : q_grid) {
    SelectionEntry entry;
    entry.q = q;
    SolverConfig cfg = config_template;
    cfg.q = q;
    cfg.refit = true;
    entry.fit = fit(problem, cfg);

    Index j_size = static_cast<Index>(entry.fit.support.size());
    Eigen::VectorXd resid = problem.y - entry.fit.fitted;
    if (criterion.form == PicSpec::Form::ScaleFree) {
      if (problem.loss != LossKind::Quadratic)
        throw std::invalid_argument("select_q: scale-free criterion needs a quadratic loss");
      double rss = resid.squaredNorm();
      double pen = complexity_penalty(j_size, 1, problem.p());
      if (criterion.a_const * pen >= static_cast<double>(problem.n())) {
        entry.admissible = false;
        entry.skip_reason = "delta(B) >= 1";
      } else if (rss <= 1e-15 * y_sq) {
        entry.admissible = false;
        entry.skip_reason = "perfect interpolation (rss ~ 0)";
      } else {
        entry.score = pic_scale_free(rss, problem.n(), 1, j_size, problem.p(), criterion.a_const);
      }
    } else {
      double restricted_loss = loss_value(problem.loss, entry.fit.fitted, problem.y);
      entry.score =
          pic_known_scale(restricted_loss, j_size, 1, problem.p(), criterion.a_const);
    }
    res.scores.push_back(entry.score);
    res.entries.push_back(std::move(entry));
  }

  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : res.entries) {
    if (!e.admissible) continue;
    if (!found || e.score < best) {
      found = true;
      best = e.score;
      res.chosen_q = e.q;
    }
  }
  if (!found) throw InadmissibleModel("select_q: every grid point is inadmissible");
  return res;
}

}  // namespace slowkill
