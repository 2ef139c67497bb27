#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "slowkill/rng.hpp"
#include "slowkill/thresholding.hpp"

using namespace slowkill;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// brute-force oracle: best objective of 1/2||Y-B||_F^2 + (eta/2)||B||_F^2
// over all supports of size <= q, using the per-row closed form of the
// restricted minimizer (independent of the operator under test).
template <class Mat>
double best_subset_objective(const Mat& y, Index q, double eta) {
  const Index p = y.rows();
  std::vector<double> rownorm2(static_cast<size_t>(p));
  double total = 0.0;
  for (Index i = 0; i < p; ++i) {
    rownorm2[static_cast<size_t>(i)] = y.row(i).squaredNorm();
    total += 0.5 * rownorm2[static_cast<size_t>(i)];
  }
  // keeping row i with the optimal value changes its cost from ||y_i||^2/2
  // to (eta/(2(1+eta))) ||y_i||^2; enumerate all C(p, q) supports
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> comb(static_cast<size_t>(q));
  for (Index i = 0; i < q; ++i) comb[static_cast<size_t>(i)] = i;
  if (q == 0) return total;
  while (true) {
    double obj = total;
    for (Index i : comb)
      obj += (eta / (2.0 * (1.0 + eta)) - 0.5) * rownorm2[static_cast<size_t>(i)];
    best = std::min(best, obj);
    Index i = q - 1;
    while (i >= 0 && comb[static_cast<size_t>(i)] == p - q + i) --i;
    if (i < 0) break;
    ++comb[static_cast<size_t>(i)];
    for (Index j = i + 1; j < q; ++j) comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
  }
  return best;
}

template <class Mat>
double objective_at(const Mat& y, const Mat& b, double eta) {
  return 0.5 * (y - b).squaredNorm() + 0.5 * eta * b.squaredNorm();
}

}  // namespace

TEST_CASE("elementwise thresholding examples") {
  VectorXd s(3);
  s << 3.0, 1.0, -2.0;
  VectorXd keep2 = quantile_threshold(s, 2, 0.0);
  CHECK(keep2[0] == 3.0);
  CHECK(keep2[1] == 0.0);
  CHECK(keep2[2] == -2.0);

  VectorXd shrunk = quantile_threshold(s, 2, 1.0);
  CHECK(shrunk[0] == doctest::Approx(1.5));
  CHECK(shrunk[1] == 0.0);
  CHECK(shrunk[2] == doctest::Approx(-1.0));

  VectorXd zeros = quantile_threshold(VectorXd::Zero(3), 2, 5.0);
  CHECK(zeros.norm() == 0.0);
}

TEST_CASE("group thresholding keeps the largest rows") {
  MatrixXd s(3, 2);
  s << 3.0, 4.0,   // norm 5
      1.0, 0.0,    // norm 1
      0.0, 3.0;    // norm 3
  MatrixXd out = group_quantile_threshold(s, 2, 0.0);
  CHECK((out.row(0) - s.row(0)).norm() == 0.0);
  CHECK(out.row(1).norm() == 0.0);
  CHECK((out.row(2) - s.row(2)).norm() == 0.0);
}

TEST_CASE("complex rows rank by modulus norm; phase does not matter") {
  MatrixXcd s(2, 1);
  s(0, 0) = {3.0, 4.0};  // norm 5
  s(1, 0) = {1.0, 1.0};  // norm sqrt(2)
  MatrixXcd out = group_quantile_threshold(s, 1, 0.0);
  CHECK(std::abs(out(0, 0)) == doctest::Approx(5.0));
  CHECK(std::abs(out(1, 0)) == 0.0);

  // rotate-then-threshold equals threshold-then-rotate
  auto eng = make_engine(3);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ph(0.0, 6.283185);
  for (int rep = 0; rep < 50; ++rep) {
    MatrixXcd m(6, 2);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 2; ++j) m(i, j) = {nd(eng), nd(eng)};
    Eigen::VectorXcd rot(6);
    for (Index i = 0; i < 6; ++i) rot[i] = std::polar(1.0, ph(eng));
    MatrixXcd rotated = rot.asDiagonal() * m;
    MatrixXcd a = group_quantile_threshold(rotated, 3, 0.5);
    MatrixXcd b = rot.asDiagonal() * group_quantile_threshold(m, 3, 0.5);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("m=1 group operator reproduces the elementwise operator") {
  auto eng = make_engine(5);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<Index> qd(0, 9);
  for (int rep = 0; rep < 500; ++rep) {
    VectorXd v(9);
    for (Index i = 0; i < 9; ++i) v[i] = nd(eng);
    Index q = qd(eng) % 10;
    q = std::min<Index>(q, 9);
    double eta = (rep % 3) * 0.5;
    MatrixXd out = group_quantile_threshold(MatrixXd(v), q, eta);
    VectorXd ref = quantile_threshold(v, q, eta);
    CHECK((out.col(0) - ref).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("brute-force global optimality of the operator") {
  auto eng = make_engine(9);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> pd(2, 10), md(1, 3);
  const double etas[] = {0.0, 0.5, 2.0};
  for (int rep = 0; rep < 300; ++rep) {
    Index p = pd(eng), m = md(eng);
    std::uniform_int_distribution<Index> qd(0, p);
    Index q = qd(eng);
    double eta = etas[rep % 3];
    MatrixXd y(p, m);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < m; ++j) y(i, j) = nd(eng);
    MatrixXd b = group_quantile_threshold(y, q, eta);
    double achieved = objective_at(y, b, eta);
    double best = best_subset_objective(y, q, eta);
    CHECK(achieved <= best + 1e-12 * (1.0 + std::abs(best)));
  }
}

TEST_CASE("cardinality bound and saturation") {
  auto eng = make_engine(21);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 200; ++rep) {
    VectorXd v(12);
    for (Index i = 0; i < 12; ++i) v[i] = nd(eng);
    Index q = rep % 13;
    VectorXd out = quantile_threshold(v, q, 0.25);
    Index nnz = 0;
    for (Index i = 0; i < 12; ++i)
      if (out[i] != 0.0) ++nnz;
    CHECK(nnz <= q);
    CHECK(nnz == q);  // random input has no zeros almost surely
  }
}

TEST_CASE("idempotence at zero shrinkage") {
  auto eng = make_engine(23);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 100; ++rep) {
    VectorXd v(10);
    for (Index i = 0; i < 10; ++i) v[i] = nd(eng);
    VectorXd once = quantile_threshold(v, 4, 0.0);
    VectorXd twice = quantile_threshold(once, 4, 0.0);
    CHECK((once - twice).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("positive scaling never changes the selected set") {
  auto eng = make_engine(25);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> cd(0.01, 100.0);
  for (int rep = 0; rep < 100; ++rep) {
    VectorXd v(8);
    for (Index i = 0; i < 8; ++i) v[i] = nd(eng);
    double c = cd(eng);
    VectorXd a = quantile_threshold(v, 3, 0.7);
    VectorXd b = quantile_threshold(VectorXd(c * v), 3, 0.7);
    for (Index i = 0; i < 8; ++i) CHECK((a[i] != 0.0) == (b[i] != 0.0));
  }
}

TEST_CASE("tie handling") {
  VectorXd s(4);
  s << 2.0, -2.0, 1.0, 0.0;
  // boundary tie between indices 0 and 1 at q=1
  ThresholdPolicy low;
  VectorXd out = quantile_threshold(s, 1, 0.0, low);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 0.0);

  ThresholdPolicy strict;
  strict.tie_mode = TieMode::StrictError;
  CHECK_THROWS_AS(quantile_threshold(s, 1, 0.0, strict), TieAtQuantile);
  // a tie at zero is allowed
  VectorXd z(3);
  z << 1.0, 0.0, 0.0;
  CHECK_NOTHROW(quantile_threshold(z, 2, 0.0, strict));
}

TEST_CASE("protected indices pass through unshrunk and unselected") {
  VectorXd s(5);
  s << 0.1, 9.0, -8.0, 7.0, 0.2;
  ThresholdPolicy pol;
  pol.protected_indices = {0};
  VectorXd out = quantile_threshold(s, 2, 1.0, pol);
  CHECK(out[0] == 0.1);                      // untouched despite tiny magnitude
  CHECK(out[1] == doctest::Approx(4.5));     // shrunk by 1/(1+1)
  CHECK(out[2] == doctest::Approx(-4.0));
  CHECK(out[3] == 0.0);
  CHECK(out[4] == 0.0);
}

TEST_CASE("argument validation") {
  VectorXd s = VectorXd::Ones(4);
  CHECK_THROWS_AS(quantile_threshold(s, 5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile_threshold(s, -1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile_threshold(s, 2, -0.5), std::invalid_argument);
  ThresholdPolicy pol;
  pol.protected_indices = {9};
  CHECK_THROWS_AS(quantile_threshold(s, 1, 0.0, pol), std::invalid_argument);
}
