#include "slowkill/experiments.hpp"

#include <cmath>

#include "slowkill/rng.hpp"

namespace slowkill {

std::string method_name(Method m) { return m == Method::SlowKill ? "slowkill" : "iht"; }

namespace {

struct Moments {
  double mean = 0.0, se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  double sum = 0.0;
  for (double x : v) sum += x;
  m.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return m;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.data.validate();
  if (config.reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
  if (config.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
  const Index q = config.effective_q();
  const bool classify = config.data.model == ResponseModel::ClassificationThreshold;
  const size_t n_methods = config.methods.size();

  std::vector<ReplicateRecord> records(static_cast<size_t>(config.reps) * n_methods);
  parallel_for(config.threads, config.reps, [&](Index r) {
    SyntheticSpec spec = config.data;
    spec.seed = derive_seed(config.seed, streams::kReplicate, static_cast<std::uint64_t>(r));
    Eigen::VectorXd beta_star = spec.effective_beta();
    Eigen::MatrixXd x = gen_design(spec);
    Eigen::VectorXd y = gen_response(x, beta_star, spec.model, spec.sigma, spec.seed);

    Problem pb;
    pb.X = std::move(x);
    pb.y = std::move(y);
    pb.loss = classify ? LossKind::Logistic : LossKind::Quadratic;
    pb.add_intercept = classify;

    Eigen::MatrixXd x_test;
    Eigen::VectorXd y_test;
    if (classify) {
      SyntheticSpec test_spec = spec;
      test_spec.seed = derive_seed(config.seed, streams::kTestSet, static_cast<std::uint64_t>(r));
      x_test = gen_design(test_spec);
      y_test = gen_response(x_test, beta_star, spec.model, spec.sigma, test_spec.seed);
    }
    std::vector<Index> true_supp = support_of(beta_star);

    for (size_t mi = 0; mi < n_methods; ++mi) {
      Method method = config.methods[mi];
      FitResult res;
      if (method == Method::SlowKill) {
        SolverConfig cfg;
        cfg.q = q;
        cfg.eta0 = config.eta0;
        cfg.schedule.kind = config.schedule;
        cfg.schedule.T = config.T;
        cfg.refit = config.refit;
        cfg.squeeze = config.squeeze;
        res = fit(pb, cfg);
      } else {
        res = iht_baseline(pb, q, config.iht_max_iter);
        if (config.refit) {
          auto rf = refit(pb, res.support, 1e-8);
          res.beta = std::move(rf.beta);
          res.intercept = rf.intercept;
        }
      }

      ReplicateRecord rec;
      rec.replicate = static_cast<int>(r);
      rec.method = method;
      rec.support = res.support;
      rec.miss_rate = miss_rate(res.support, true_supp);
      rec.pred_error = classify
                           ? misclass_rate(res.beta, res.intercept, x_test, y_test)
                           : pred_error_regression(res.beta, beta_star, spec.cov, spec.tau);
      rec.seconds = res.wall_time_s;
      records[static_cast<size_t>(r) * n_methods + mi] = std::move(rec);
    }
  });

  ExperimentResult out;
  out.records = std::move(records);
  for (size_t mi = 0; mi < n_methods; ++mi) {
    std::vector<double> miss, err;
    double secs = 0.0;
    for (size_t i = mi; i < out.records.size(); i += n_methods) {
      miss.push_back(out.records[i].miss_rate);
      err.push_back(out.records[i].pred_error);
      secs += out.records[i].seconds;
    }
    Moments mm = moments(miss), me = moments(err);
    MethodSummary s;
    s.method = config.methods[mi];
    s.reps = config.reps;
    s.miss_mean = mm.mean;
    s.miss_se = mm.se;
    s.err_mean = me.mean;
    s.err_se = me.se;
    s.seconds_total = secs;
    out.summary.push_back(s);
  }
  return out;
}

}  // namespace slowkill
