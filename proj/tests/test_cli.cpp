#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "slowkill/io.hpp"
#include "slowkill/rng.hpp"
#include "slowkill/solver.hpp"
#include "slowkill/synthetic.hpp"

using json = nlohmann::json;
using namespace slowkill;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "slowkill_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(CLI_BIN) + " " + args + " 2>" + (workdir() / "stderr.log").string();
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// orthogonal noiseless fixture with three active coordinates
void write_fixture(const fs::path& xp, const fs::path& yp) {
  Index n = 16;
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  beta[1] = 1.0;
  beta[6] = -2.0;
  beta[11] = 1.5;
  write_matrix_csv(xp.string(), x);
  write_matrix_csv(yp.string(), Eigen::MatrixXd(x * beta));
}

json strip_volatile(json j) {
  j.erase("wall_time_s");
  return j;
}

}  // namespace

TEST_CASE("fit on the orthogonal fixture recovers the known support") {
  auto xp = workdir() / "x.csv";
  auto yp = workdir() / "y.csv";
  write_fixture(xp, yp);
  auto out = workdir() / "fit.json";
  int rc = run_cli("fit --x " + xp.string() + " --y " + yp.string() +
                   " --q 3 --eta0 0 --T 10 --refit --out " + out.string());
  CHECK(rc == 0);
  json res = json::parse(slurp(out));
  CHECK(res["support"] == json::array({2, 7, 12}));  // 1-based
  CHECK(res["fixed_point_residual"].get<double>() <= 1e-8);

  // round trip: rebuild beta and re-verify the recorded residual
  Problem pb;
  pb.X = read_matrix_csv(xp.string());
  pb.y = read_matrix_csv(yp.string()).col(0);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(pb.p());
  for (const auto& c : res["coefficients"])
    beta[c["index"].get<Index>() - 1] = c["value"].get<double>();
  double resid = fixed_point_residual(pb, beta, res["rho_final"].get<double>(),
                                      res["config"]["q"].get<Index>(),
                                      res["eta_bar_final"].get<double>(),
                                      res["intercept"].get<double>());
  CHECK(resid <= std::max(1e-8, 2.0 * res["fixed_point_residual"].get<double>()));
}

TEST_CASE("fit exit codes") {
  auto xp = workdir() / "x.csv";
  auto yp = workdir() / "y.csv";
  write_fixture(xp, yp);
  // missing --q
  CHECK(run_cli("fit --x " + xp.string() + " --y " + yp.string()) == 2);
  // unknown subcommand
  CHECK(run_cli("frobnicate") == 2);
  // missing file
  CHECK(run_cli("fit --x /nonexistent.csv --y " + yp.string() + " --q 2") == 2);
  // dimension mismatch: response with the wrong number of rows
  auto ybad = workdir() / "ybad.csv";
  write_matrix_csv(ybad.string(), Eigen::MatrixXd::Ones(7, 1));
  CHECK(run_cli("fit --x " + xp.string() + " --y " + ybad.string() + " --q 2") == 3);
}

TEST_CASE("fit output is deterministic modulo timing") {
  auto xp = workdir() / "x.csv";
  auto yp = workdir() / "y.csv";
  write_fixture(xp, yp);
  auto o1 = workdir() / "d1.json";
  auto o2 = workdir() / "d2.json";
  CHECK(run_cli("fit --x " + xp.string() + " --y " + yp.string() + " --q 3 --seed 5 --out " +
                o1.string()) == 0);
  CHECK(run_cli("fit --x " + xp.string() + " --y " + yp.string() + " --q 3 --seed 5 --out " +
                o2.string()) == 0);
  CHECK(strip_volatile(json::parse(slurp(o1))).dump() ==
        strip_volatile(json::parse(slurp(o2))).dump());
}

TEST_CASE("complex MMV fit through the CLI") {
  auto eng = make_engine(606);
  std::normal_distribution<double> nd;
  Index n = 30, p = 40, m = 2;
  Eigen::MatrixXcd x(n, p), b = Eigen::MatrixXcd::Zero(p, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = {nd(eng), nd(eng)};
  for (Index r : {4, 17, 29})
    for (Index j = 0; j < m; ++j) b(r, j) = {nd(eng), nd(eng)};
  auto xp = workdir() / "xc.csv";
  auto yp = workdir() / "yc.csv";
  write_complex_matrix_csv(xp.string(), x);
  write_complex_matrix_csv(yp.string(), x * b);
  auto out = workdir() / "mmv.json";
  int rc = run_cli("fit --x " + xp.string() + " --y " + yp.string() +
                   " --loss complex-mmv --complex --q 3 --eta0 0 --T 20 --refit --out " +
                   out.string());
  CHECK(rc == 0);
  json res = json::parse(slurp(out));
  CHECK(res["support"] == json::array({5, 18, 30}));
}

TEST_CASE("bench smoke run is deterministic modulo timing") {
  auto s1 = workdir() / "s1.csv";
  auto r1 = workdir() / "r1.jsonl";
  auto s2 = workdir() / "s2.csv";
  auto r2 = workdir() / "r2.jsonl";
  std::string common =
      " --preset custom --n 40 --p 60 --s 3 --tau 0.3 --reps 2 --seed 7 --T 20 --threads 2";
  CHECK(run_cli("bench" + common + " --out-summary " + s1.string() + " --out-replicates " +
                r1.string()) == 0);
  CHECK(run_cli("bench" + common + " --out-summary " + s2.string() + " --out-replicates " +
                r2.string()) == 0);

  // summary rows match except the timing column (last field)
  auto strip_time_csv = [](const std::string& text) {
    std::string out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  CHECK(strip_time_csv(slurp(s1)) == strip_time_csv(slurp(s2)));
  CHECK(slurp(s1).substr(0, 7) == "preset,");

  auto strip_time_jsonl = [](const std::string& text) {
    std::string out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
      json j = json::parse(line);
      j.erase("seconds");
      out += j.dump() + "\n";
    }
    return out;
  };
  CHECK(strip_time_jsonl(slurp(r1)) == strip_time_jsonl(slurp(r2)));

  CHECK(run_cli("bench --preset no-such-preset") == 2);
}

TEST_CASE("select-q via the CLI: scaling leaves the argmin unchanged") {
  SyntheticSpec spec;
  spec.n = 50;
  spec.p = 30;
  spec.s = 3;
  spec.tau = 0.3;
  spec.sigma = 0.4;
  spec.seed = 12;
  Eigen::MatrixXd x = gen_design(spec);
  Eigen::VectorXd y = gen_response(x, spec.effective_beta(), spec.model, spec.sigma, spec.seed);
  auto xp = workdir() / "sx.csv";
  auto yp = workdir() / "sy.csv";
  auto yp10 = workdir() / "sy10.csv";
  write_matrix_csv(xp.string(), x);
  write_matrix_csv(yp.string(), Eigen::MatrixXd(y));
  write_matrix_csv(yp10.string(), Eigen::MatrixXd(10.0 * y));

  auto o1 = workdir() / "sel1.json";
  auto o2 = workdir() / "sel2.json";
  CHECK(run_cli("select-q --x " + xp.string() + " --y " + yp.string() +
                " --q-grid 2:6:1 --pic scale-free --A 2 --eta0 5 --T 20 --out " + o1.string()) ==
        0);
  CHECK(run_cli("select-q --x " + xp.string() + " --y " + yp10.string() +
                " --q-grid 2:6:1 --pic scale-free --A 2 --eta0 5 --T 20 --out " + o2.string()) ==
        0);
  json a = json::parse(slurp(o1));
  json b = json::parse(slurp(o2));
  CHECK(a["chosen_q"] == b["chosen_q"]);

  // a one-point grid evaluates exactly once
  auto o3 = workdir() / "sel3.json";
  CHECK(run_cli("select-q --x " + xp.string() + " --y " + yp.string() +
                " --q-grid 3:3:1 --T 20 --out " + o3.string()) == 0);
  json c = json::parse(slurp(o3));
  CHECK(c["chosen_q"] == 3);
  CHECK(c["entries"].size() == 1);

  // an A too large for every grid point: all inadmissible
  CHECK(run_cli("select-q --x " + xp.string() + " --y " + yp.string() +
                " --q-grid 2:6:1 --pic scale-free --A 1000000 --T 20 --out " +
                (workdir() / "sel4.json").string()) == 4);
}

TEST_CASE("rip-curve via the CLI") {
  auto out = workdir() / "curve.csv";
  CHECK(run_cli("rip-curve --n 60 --p 24 --s 2 --tau 0.5 --theta-grid 2:2:1 --samples 200 "
                "--reps 2 --threads 2 --out " +
                out.string()) == 0);
  std::string text = slurp(out);
  CHECK(text.substr(0, 23) == "theta,mean_ratio,stderr");
  int lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == 2);  // header + one theta row

  // theta*s beyond p/2 is rejected up front
  CHECK(run_cli("rip-curve --n 20 --p 12 --s 2 --theta-grid 10:10:1 --samples 10 --reps 1") == 2);
}
