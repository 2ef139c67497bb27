#pragma once

#include "slowkill/solver.hpp"

namespace slowkill {

// Predictive information criterion for choosing the cardinality q: loss plus
// A * (J m + J log(ep/J)), in known-scale or scale-free (log-RSS) form.

struct InadmissibleModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonpositiveRss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// P(J) = J m + J log(e p / J), with P(0) = 0 by continuity.
double complexity_penalty(Index support_size, Index m, Index p);

/// loss + A * P(J).
double pic_known_scale(double loss_value, Index support_size, Index m, Index p, double a_const);

/// m n log(rss) + A * P(J); requires rss > 0 and delta = A P / (mn) < 1.
double pic_scale_free(double rss, Index n, Index m, Index support_size, Index p, double a_const);

struct PicSpec {
  enum class Form { KnownScale, ScaleFree };
  Form form = Form::ScaleFree;
  double a_const = 2.0;
};

struct SelectionEntry {
  Index q = 0;
  double score = std::numeric_limits<double>::quiet_NaN();
  bool admissible = true;
  std::string skip_reason;
  FitResult fit;
};

struct SelectionResult {
  std::vector<Index> q_grid;
  std::vector<double> scores;  // NaN for skipped entries
  Index chosen_q = 0;
  std::vector<SelectionEntry> entries;
};

/// Fits each q on the grid (refit enabled), scores the refit models with the
/// chosen criterion, and returns the argmin along with the whole path.
/// Inadmissible grid points are skipped with a recorded reason; throws
/// InadmissibleModel if nothing on the grid is admissible.
SelectionResult select_q(const Problem& problem, std::span<const Index> q_grid,
                         const SolverConfig& config_template, const PicSpec& criterion);

}  // namespace slowkill
