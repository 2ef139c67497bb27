#pragma once

#include "slowkill/metrics.hpp"
#include "slowkill/solver.hpp"

namespace slowkill {

// Monte-Carlo harness: repeated synthetic fits with per-method miss rate,
// prediction error (or misclassification) and wall time.

enum class Method { SlowKill, Iht };

std::string method_name(Method m);

struct ExperimentConfig {
  SyntheticSpec data;
  std::vector<Method> methods{Method::SlowKill};
  Index q = 0;  // 0 -> floor(1.5 s)
  double eta0 = 50.0;
  int T = 100;
  ScheduleKind schedule = ScheduleKind::Inverse;
  bool refit = true;
  bool squeeze = true;
  int iht_max_iter = 300;
  int reps = 50;
  std::uint64_t seed = 1;
  int threads = 1;

  Index effective_q() const {
    return q > 0 ? q : static_cast<Index>(std::floor(1.5 * static_cast<double>(data.s)));
  }
};

struct ReplicateRecord {
  int replicate = 0;
  Method method = Method::SlowKill;
  double miss_rate = 0.0;
  double pred_error = 0.0;  // regression metric or misclassification %
  double seconds = 0.0;
  std::vector<Index> support;
};

struct MethodSummary {
  Method method = Method::SlowKill;
  int reps = 0;
  double miss_mean = 0.0, miss_se = 0.0;
  double err_mean = 0.0, err_se = 0.0;
  double seconds_total = 0.0;
};

struct ExperimentResult {
  std::vector<MethodSummary> summary;
  std::vector<ReplicateRecord> records;  // ordered by (replicate, method)
};

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace slowkill
