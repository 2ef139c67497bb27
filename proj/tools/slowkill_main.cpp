// Command-line front end: fit / bench / select-q / rip-curve with file-based
// IO and reproducible seeds. Exit codes: 0 ok, 2 malformed input, 3 dimension
// mismatch, 4 no admissible model.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "slowkill/experiments.hpp"
#include "slowkill/io.hpp"
#include "slowkill/rip.hpp"
#include "slowkill/selection.hpp"

using json = nlohmann::json;
using namespace slowkill;

namespace {

int default_threads() {
  if (const char* env = std::getenv("SLOWKILL_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

std::vector<Index> parse_index_grid(const std::string& text) {
  long lo = 0, hi = 0, step = 1;
  if (std::sscanf(text.c_str(), "%ld:%ld:%ld", &lo, &hi, &step) != 3 || step < 1 || hi < lo)
    throw ParseError("grid must be lo:hi:step with step >= 1, got '" + text + "'");
  std::vector<Index> out;
  for (long v = lo; v <= hi; v += step) out.push_back(static_cast<Index>(v));
  return out;
}

std::vector<double> parse_double_grid(const std::string& text) {
  double lo = 0, hi = 0, step = 1;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0 ||
      hi < lo - 1e-12)
    throw ParseError("grid must be lo:hi:step with step > 0, got '" + text + "'");
  std::vector<double> out;
  for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << text;
}

json support_1based(const std::vector<Index>& support) {
  json arr = json::array();
  for (Index j : support) arr.push_back(j + 1);
  return arr;
}

struct FitArgs {
  std::string x_path, y_path, out_path = "result.json";
  std::string loss = "quadratic", schedule = "inverse";
  Index q = 0;
  double eta0 = 50.0;
  int T = 100;
  bool intercept = false, no_squeeze = false, do_refit = false, complex_input = false;
  double alpha = 0.5;
  int max_search = 5, k0 = 1;
  double polish_tol = 1e-8;
  int polish_max_iter = 500;
  double sigmoid_a = 1.0, sigmoid_b = 5.0, sigmoid_c = 1.0;
  std::uint64_t seed = 0;
};

SolverConfig make_solver_config(const FitArgs& a) {
  SolverConfig cfg;
  cfg.q = a.q;
  cfg.eta0 = a.eta0;
  cfg.schedule.T = a.T;
  cfg.schedule.kind = a.schedule == "constant"  ? ScheduleKind::Constant
                      : a.schedule == "sigmoidal" ? ScheduleKind::Sigmoidal
                                                  : ScheduleKind::Inverse;
  cfg.schedule.sigmoid_a = a.sigmoid_a;
  cfg.schedule.sigmoid_b = a.sigmoid_b;
  cfg.schedule.sigmoid_c = a.sigmoid_c;
  cfg.alpha = a.alpha;
  cfg.max_search = a.max_search;
  cfg.squeeze = !a.no_squeeze;
  cfg.k0 = a.k0;
  cfg.polish_tol = a.polish_tol;
  cfg.polish_max_iter = a.polish_max_iter;
  cfg.refit = a.do_refit;
  return cfg;
}

json config_json(const FitArgs& a) {
  return json{{"q", a.q},
              {"eta0", a.eta0},
              {"T", a.T},
              {"schedule", a.schedule},
              {"alpha", a.alpha},
              {"max_search", a.max_search},
              {"squeeze", !a.no_squeeze},
              {"k0", a.k0},
              {"polish_tol", a.polish_tol},
              {"polish_max_iter", a.polish_max_iter},
              {"refit", a.do_refit},
              {"intercept", a.intercept},
              {"seed", a.seed}};
}

template <class Result>
json traces_json(const Result& res) {
  return json{{"objective", res.objective_trace},
              {"rho", res.rho_trace},
              {"q", res.q_trace}};
}

int cmd_fit(const FitArgs& a) {
  json out;
  out["command"] = "fit";
  out["loss"] = a.loss;
  out["config"] = config_json(a);

  if (a.loss == "complex-mmv") {
    if (!a.complex_input)
      throw ParseError("--loss complex-mmv requires --complex input files");
    MmvProblem pb;
    pb.X = read_complex_matrix_csv(a.x_path);
    pb.Y = read_complex_matrix_csv(a.y_path);
    MmvFitResult res = fit(pb, make_solver_config(a));
    out["n"] = pb.n();
    out["p"] = pb.p();
    out["m"] = pb.m();
    out["support"] = support_1based(res.support);
    json coef = json::array();
    for (Index r : res.support) {
      json row = json::array();
      for (Index j = 0; j < pb.m(); ++j)
        row.push_back(json::array({res.coef(r, j).real(), res.coef(r, j).imag()}));
      coef.push_back(json{{"index", r + 1}, {"value", row}});
    }
    out["coefficients"] = coef;
    out["iterations"] = res.iterations;
    out["line_search_warnings"] = res.line_search_warnings;
    out["refit_fallback"] = res.refit_fallback;
    out["rho_final"] = res.rho_final;
    out["eta_bar_final"] = res.eta_bar_final;
    out["fixed_point_residual"] = res.fixed_point_residual;
    out["traces"] = traces_json(res);
    out["wall_time_s"] = res.wall_time_s;
  } else {
    Problem pb;
    pb.X = read_matrix_csv(a.x_path);
    Eigen::MatrixXd ym = read_matrix_csv(a.y_path);
    if (ym.cols() != 1) throw DimensionError("fit: response file must have one column");
    pb.y = ym.col(0);
    pb.loss = a.loss == "logistic" ? LossKind::Logistic : LossKind::Quadratic;
    pb.add_intercept = a.intercept;
    FitResult res = fit(pb, make_solver_config(a));
    out["n"] = pb.n();
    out["p"] = pb.p();
    out["support"] = support_1based(res.support);
    json coef = json::array();
    for (Index j : res.support) coef.push_back(json{{"index", j + 1}, {"value", res.beta[j]}});
    out["coefficients"] = coef;
    out["intercept"] = res.intercept;
    out["iterations"] = res.iterations;
    out["line_search_warnings"] = res.line_search_warnings;
    out["refit_fallback"] = res.refit_fallback;
    out["rho_final"] = res.rho_final;
    out["eta_bar_final"] = res.eta_bar_final;
    out["fixed_point_residual"] = res.fixed_point_residual;
    out["traces"] = traces_json(res);
    out["wall_time_s"] = res.wall_time_s;
  }
  write_text(a.out_path, out.dump(2) + "\n");
  std::fprintf(stderr, "fit: wrote %s\n", a.out_path.c_str());
  return 0;
}

struct BenchArgs {
  std::string preset = "custom";
  Index n = 0, p = 0, s = 0;
  double tau = -1.0, sigma = -1.0;
  std::string cov = "", model = "", methods = "";
  Index q = 0;
  double eta0 = 50.0;
  int T = 100;
  int reps = 50;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_summary = "bench_summary.csv", out_replicates = "bench_replicates.jsonl";
};

int cmd_bench(const BenchArgs& a) {
  ExperimentConfig cfg;
  cfg.data.cov = CovKind::Toeplitz;
  if (a.preset == "table41-toeplitz" || a.preset == "table41-equal") {
    cfg.data.n = 150;
    cfg.data.p = 5000;
    cfg.data.s = 10;
    cfg.data.tau = 0.9;
    cfg.data.sigma = 1.0;
    cfg.data.model = ResponseModel::RegressionGaussianNoise;
    cfg.methods = {Method::SlowKill, Method::Iht};
    if (a.preset == "table41-equal") cfg.data.cov = CovKind::EqualCorrelation;
  } else if (a.preset == "table42-toeplitz" || a.preset == "table42-equal") {
    cfg.data.n = 500;
    cfg.data.p = 2000;
    cfg.data.s = 10;
    cfg.data.tau = 0.9;
    cfg.data.sigma = 0.0;
    cfg.data.model = ResponseModel::ClassificationThreshold;
    cfg.methods = {Method::SlowKill};
    if (a.preset == "table42-equal") cfg.data.cov = CovKind::EqualCorrelation;
  } else if (a.preset == "custom") {
    if (a.n == 0 || a.p == 0 || a.s == 0)
      throw ParseError("bench custom preset needs --n, --p and --s");
    cfg.data.n = a.n;
    cfg.data.p = a.p;
    cfg.data.s = a.s;
    cfg.data.tau = 0.5;
    cfg.data.sigma = 1.0;
    cfg.data.model = ResponseModel::RegressionGaussianNoise;
    cfg.methods = {Method::SlowKill};
  } else {
    throw ParseError("unknown preset: " + a.preset);
  }
  if (a.n > 0) cfg.data.n = a.n;
  if (a.p > 0) cfg.data.p = a.p;
  if (a.s > 0) cfg.data.s = a.s;
  if (a.tau >= 0) cfg.data.tau = a.tau;
  if (a.sigma >= 0) cfg.data.sigma = a.sigma;
  if (!a.cov.empty())
    cfg.data.cov = a.cov == "equal"      ? CovKind::EqualCorrelation
                   : a.cov == "identity" ? CovKind::Identity
                                         : CovKind::Toeplitz;
  if (!a.model.empty())
    cfg.data.model = a.model == "classification" ? ResponseModel::ClassificationThreshold
                                                 : ResponseModel::RegressionGaussianNoise;
  if (!a.methods.empty()) {
    cfg.methods.clear();
    std::stringstream ss(a.methods);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "slowkill")
        cfg.methods.push_back(Method::SlowKill);
      else if (tok == "iht")
        cfg.methods.push_back(Method::Iht);
      else
        throw ParseError("unknown method: " + tok);
    }
  }
  cfg.q = a.q;
  cfg.eta0 = a.eta0;
  cfg.T = a.T;
  cfg.reps = a.reps;
  cfg.seed = a.seed;
  cfg.threads = a.threads > 0 ? a.threads : default_threads();

  std::fprintf(stderr, "bench: preset=%s n=%lld p=%lld s=%lld tau=%.3f reps=%d threads=%d\n",
               a.preset.c_str(), static_cast<long long>(cfg.data.n),
               static_cast<long long>(cfg.data.p), static_cast<long long>(cfg.data.s),
               cfg.data.tau, cfg.reps, cfg.threads);
  ExperimentResult res = run_experiment(cfg);

  const bool classify = cfg.data.model == ResponseModel::ClassificationThreshold;
  std::string csv =
      "preset,method,model,cov,n,p,s,tau,sigma,reps,q,eta0,T,seed,"
      "miss_mean,miss_se,err_mean,err_se,seconds_total\n";
  char line[512];
  for (const auto& s : res.summary) {
    std::snprintf(line, sizeof(line),
                  "%s,%s,%s,%s,%lld,%lld,%lld,%.17g,%.17g,%d,%lld,%.17g,%d,%llu,"
                  "%.17g,%.17g,%.17g,%.17g,%.6f\n",
                  a.preset.c_str(), method_name(s.method).c_str(),
                  classify ? "classification" : "regression",
                  cfg.data.cov == CovKind::Toeplitz          ? "toeplitz"
                  : cfg.data.cov == CovKind::EqualCorrelation ? "equal"
                                                              : "identity",
                  static_cast<long long>(cfg.data.n), static_cast<long long>(cfg.data.p),
                  static_cast<long long>(cfg.data.s), cfg.data.tau, cfg.data.sigma, cfg.reps,
                  static_cast<long long>(cfg.effective_q()), cfg.eta0, cfg.T,
                  static_cast<unsigned long long>(cfg.seed), s.miss_mean, s.miss_se, s.err_mean,
                  s.err_se, s.seconds_total);
    csv += line;
  }
  write_text(a.out_summary, csv);

  std::string jsonl;
  for (const auto& r : res.records) {
    json rec{{"replicate", r.replicate},
             {"method", method_name(r.method)},
             {"miss_rate", r.miss_rate},
             {"pred_error", r.pred_error},
             {"seconds", r.seconds},
             {"support", support_1based(r.support)}};
    jsonl += rec.dump() + "\n";
  }
  write_text(a.out_replicates, jsonl);

  for (const auto& s : res.summary)
    std::fprintf(stderr, "bench: %-8s miss=%.4f err=%.4f time=%.2fs\n",
                 method_name(s.method).c_str(), s.miss_mean, s.err_mean, s.seconds_total);
  return 0;
}

struct SelectArgs {
  std::string x_path, y_path, out_path = "selectq.json";
  std::string grid = "", pic = "scale-free", loss = "quadratic";
  double a_const = 2.0;
  double eta0 = 50.0;
  int T = 100;
  bool intercept = false;
  std::uint64_t seed = 0;
};

int cmd_select_q(const SelectArgs& a) {
  Problem pb;
  pb.X = read_matrix_csv(a.x_path);
  Eigen::MatrixXd ym = read_matrix_csv(a.y_path);
  if (ym.cols() != 1) throw DimensionError("select-q: response file must have one column");
  pb.y = ym.col(0);
  pb.loss = a.loss == "logistic" ? LossKind::Logistic : LossKind::Quadratic;
  pb.add_intercept = a.intercept;

  std::vector<Index> grid = parse_index_grid(a.grid);
  SolverConfig tmpl;
  tmpl.eta0 = a.eta0;
  tmpl.schedule.T = a.T;
  PicSpec crit;
  crit.form = a.pic == "known-scale" ? PicSpec::Form::KnownScale : PicSpec::Form::ScaleFree;
  crit.a_const = a.a_const;

  SelectionResult res = select_q(pb, grid, tmpl, crit);

  json out;
  out["command"] = "select-q";
  out["pic"] = a.pic;
  out["A"] = a.a_const;
  out["q_grid"] = res.q_grid;
  json scores = json::array();
  for (double s : res.scores) {
    if (std::isnan(s))
      scores.push_back(nullptr);
    else
      scores.push_back(s);
  }
  out["scores"] = scores;
  out["chosen_q"] = res.chosen_q;
  json entries = json::array();
  for (const auto& e : res.entries) {
    json je{{"q", e.q}, {"support", support_1based(e.fit.support)}};
    if (e.admissible)
      je["score"] = e.score;
    else
      je["skipped"] = e.skip_reason;
    entries.push_back(je);
  }
  out["entries"] = entries;
  write_text(a.out_path, out.dump(2) + "\n");
  std::fprintf(stderr, "select-q: chose q=%lld, wrote %s\n",
               static_cast<long long>(res.chosen_q), a.out_path.c_str());
  return 0;
}

struct RipArgs {
  Index n = 2000, p = 4000, s = 4;
  double tau = 0.5;
  std::string grid = "2:12:2";
  int samples = 2000, reps = 20;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_path = "rip_curve.csv";
};

int cmd_rip_curve(const RipArgs& a) {
  std::vector<double> grid = parse_double_grid(a.grid);
  int threads = a.threads > 0 ? a.threads : default_threads();
  std::fprintf(stderr, "rip-curve: n=%lld p=%lld s=%lld tau=%.3f reps=%d samples=%d threads=%d\n",
               static_cast<long long>(a.n), static_cast<long long>(a.p),
               static_cast<long long>(a.s), a.tau, a.reps, a.samples, threads);
  auto curve = rip_ratio_curve(a.n, a.p, a.s, a.tau, grid, a.samples, a.reps, a.seed, threads);
  std::string csv = "theta,mean_ratio,stderr\n";
  char line[160];
  for (const auto& pt : curve) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", pt.theta, pt.mean_ratio,
                  pt.stderr_ratio);
    csv += line;
  }
  write_text(a.out_path, csv);
  std::fprintf(stderr, "rip-curve: wrote %s\n", a.out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slowkill: l0-constrained sparse learning by backward quantile thresholding"};
  app.require_subcommand(1);

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "fit one model from CSV inputs");
  fit_cmd->add_option("--x", fa.x_path, "design matrix CSV")->required();
  fit_cmd->add_option("--y", fa.y_path, "response CSV")->required();
  fit_cmd->add_option("--loss", fa.loss, "quadratic|logistic|complex-mmv")
      ->check(CLI::IsMember({"quadratic", "logistic", "complex-mmv"}));
  fit_cmd->add_option("--q", fa.q, "target cardinality")->required();
  fit_cmd->add_option("--eta0", fa.eta0, "target l2 shrinkage (default 50)");
  fit_cmd->add_option("--T", fa.T, "cooling steps (default 100)");
  fit_cmd->add_option("--schedule", fa.schedule, "inverse|sigmoidal|constant")
      ->check(CLI::IsMember({"inverse", "sigmoidal", "constant"}));
  fit_cmd->add_flag("--intercept", fa.intercept, "add an unpenalized intercept");
  fit_cmd->add_flag("--no-squeeze", fa.no_squeeze, "disable design squeezing");
  fit_cmd->add_flag("--refit", fa.do_refit, "refit on the selected support");
  fit_cmd->add_flag("--complex", fa.complex_input, "inputs are re,im column pairs");
  fit_cmd->add_option("--alpha", fa.alpha, "line-search shrink factor");
  fit_cmd->add_option("--max-search", fa.max_search, "line-search moves per step");
  fit_cmd->add_option("--k0", fa.k0, "first squeezing halving level");
  fit_cmd->add_option("--polish-tol", fa.polish_tol, "polish gradient tolerance");
  fit_cmd->add_option("--polish-max-iter", fa.polish_max_iter, "polish iteration cap");
  fit_cmd->add_option("--sigmoid-a", fa.sigmoid_a, "sigmoidal shape a");
  fit_cmd->add_option("--sigmoid-b", fa.sigmoid_b, "sigmoidal shape b");
  fit_cmd->add_option("--sigmoid-c", fa.sigmoid_c, "sigmoidal shape c");
  fit_cmd->add_option("--seed", fa.seed, "seed recorded in the output");
  fit_cmd->add_option("--out", fa.out_path, "output JSON path");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "synthetic benchmark harness");
  bench_cmd
      ->add_option("--preset", ba.preset,
                   "table41-toeplitz|table41-equal|table42-toeplitz|table42-equal|custom")
      ->required();
  bench_cmd->add_option("--n", ba.n, "observations");
  bench_cmd->add_option("--p", ba.p, "predictors");
  bench_cmd->add_option("--s", ba.s, "true support size");
  bench_cmd->add_option("--tau", ba.tau, "correlation strength");
  bench_cmd->add_option("--sigma", ba.sigma, "regression noise scale");
  bench_cmd->add_option("--cov", ba.cov, "toeplitz|equal|identity");
  bench_cmd->add_option("--model", ba.model, "regression|classification");
  bench_cmd->add_option("--methods", ba.methods, "comma list: slowkill,iht");
  bench_cmd->add_option("--q", ba.q, "cardinality (default floor(1.5 s))");
  bench_cmd->add_option("--eta0", ba.eta0, "target l2 shrinkage");
  bench_cmd->add_option("--T", ba.T, "cooling steps");
  bench_cmd->add_option("--reps", ba.reps, "replicates");
  bench_cmd->add_option("--seed", ba.seed, "master seed");
  bench_cmd->add_option("--threads", ba.threads, "worker threads");
  bench_cmd->add_option("--out-summary", ba.out_summary, "summary CSV path");
  bench_cmd->add_option("--out-replicates", ba.out_replicates, "per-replicate JSONL path");

  SelectArgs sa;
  auto* sel_cmd = app.add_subcommand("select-q", "choose the cardinality by information criterion");
  sel_cmd->add_option("--x", sa.x_path, "design matrix CSV")->required();
  sel_cmd->add_option("--y", sa.y_path, "response CSV")->required();
  sel_cmd->add_option("--q-grid", sa.grid, "lo:hi:step")->required();
  sel_cmd->add_option("--pic", sa.pic, "known-scale|scale-free")
      ->check(CLI::IsMember({"known-scale", "scale-free"}));
  sel_cmd->add_option("--A", sa.a_const, "criterion constant (default 2)");
  sel_cmd->add_option("--loss", sa.loss, "quadratic|logistic")
      ->check(CLI::IsMember({"quadratic", "logistic"}));
  sel_cmd->add_option("--eta0", sa.eta0, "target l2 shrinkage");
  sel_cmd->add_option("--T", sa.T, "cooling steps");
  sel_cmd->add_flag("--intercept", sa.intercept, "add an unpenalized intercept");
  sel_cmd->add_option("--seed", sa.seed, "seed recorded in the output");
  sel_cmd->add_option("--out", sa.out_path, "output JSON path");

  RipArgs ra;
  auto* rip_cmd = app.add_subcommand("rip-curve", "restricted-isometry ratio curve");
  rip_cmd->add_option("--n", ra.n, "observations");
  rip_cmd->add_option("--p", ra.p, "predictors");
  rip_cmd->add_option("--s", ra.s, "sparsity");
  rip_cmd->add_option("--tau", ra.tau, "Toeplitz correlation");
  rip_cmd->add_option("--theta-grid", ra.grid, "lo:hi:step");
  rip_cmd->add_option("--samples", ra.samples, "subset samples per estimate");
  rip_cmd->add_option("--reps", ra.reps, "design replicates");
  rip_cmd->add_option("--seed", ra.seed, "master seed");
  rip_cmd->add_option("--threads", ra.threads, "worker threads");
  rip_cmd->add_option("--out", ra.out_path, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints help or the error
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(fit_cmd)) return cmd_fit(fa);
    if (app.got_subcommand(bench_cmd)) return cmd_bench(ba);
    if (app.got_subcommand(sel_cmd)) return cmd_select_q(sa);
    if (app.got_subcommand(rip_cmd)) return cmd_rip_curve(ra);
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const InadmissibleModel& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
