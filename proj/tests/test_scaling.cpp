#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ippmm/scaling.hpp"
#include "oracles.hpp"

using namespace ippmm;

namespace {

SpMat from_dense(const Eigen::MatrixXd& d) { return oracle::sparse_of(d); }

bool is_power_of_two(double v) {
  int e;
  double f = std::frexp(v, &e);
  return f == 0.5;
}

}  // namespace

TEST_CASE("row with magnitudes 4 and 16 gets factor 1/8") {
  Eigen::MatrixXd Ad(2, 2);
  Ad << 4, 16,  // geometric mean 8 -> factor 2^-3
      1, 1;     // unit row stays at 1
  SpMat A = from_dense(Ad);
  Vec b(2);
  b << 64, 3;
  RowScaling s = scale_rows(A, b);

  REQUIRE_FALSE(s.is_identity);
  CHECK(s.d[0] == 0.125);
  CHECK(s.d[1] == 1.0);
  CHECK(Eigen::MatrixXd(A)(0, 0) == 0.5);
  CHECK(Eigen::MatrixXd(A)(0, 1) == 2.0);
  CHECK(Eigen::MatrixXd(A)(1, 0) == 1.0);
  CHECK(b[0] == 8.0);  // b scaled by the same factors
  CHECK(b[1] == 3.0);
}

TEST_CASE("well-scaled matrices are left untouched") {
  Eigen::MatrixXd Ad(2, 2);
  Ad << 0.5, 2.0, 1.0, 5.0;
  SpMat A = from_dense(Ad);
  SpMat before = A;
  Vec b(2);
  b << 1, 2;
  RowScaling s = scale_rows(A, b);
  CHECK(s.is_identity);
  CHECK((Eigen::MatrixXd(A) - Eigen::MatrixXd(before)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == 2.0);
}

TEST_CASE("zero rows keep factor one") {
  Eigen::MatrixXd Ad = Eigen::MatrixXd::Zero(2, 2);
  Ad(0, 0) = 1000.0;  // forces scaling on row 0
  SpMat A = from_dense(Ad);
  Vec b(2);
  b << 5, 7;
  RowScaling s = scale_rows(A, b);
  REQUIRE_FALSE(s.is_identity);
  CHECK(s.d[1] == 1.0);
  CHECK(b[1] == 7.0);
}

TEST_CASE("factor is the largest power of two below the geometric rule") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> mag(-8, 8);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd Ad(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) Ad(i, j) = std::ldexp(1.0, (int)mag(rng));
    Ad(0, 0) = 1024;  // guarantee the well-scaled test fails
    SpMat A = from_dense(Ad);
    SpMat orig = A;
    Vec b = Vec::Ones(3);
    RowScaling s = scale_rows(A, b);
    REQUIRE_FALSE(s.is_identity);
    for (int i = 0; i < 3; ++i) {
      double mx = Ad.row(i).cwiseAbs().maxCoeff();
      double mn = 1e300;
      for (int j = 0; j < 4; ++j)
        if (Ad(i, j) != 0) mn = std::min(mn, std::abs(Ad(i, j)));
      double raw = 1.0 / std::sqrt(mx * mn);
      CHECK(is_power_of_two(s.d[i]));
      CHECK(s.d[i] <= raw);
      CHECK(2 * s.d[i] > raw);
    }
    // power-of-two scaling is exact in binary floating point
    for (Index k = 0; k < orig.outerSize(); ++k)
      for (SpMat::InnerIterator ito(orig, k), itn(A, k); ito; ++ito, ++itn)
        CHECK(itn.value() == ito.value() * s.d[ito.row()]);
  }
}

TEST_CASE("unit row inside a rescaled matrix is a fixed point") {
  Eigen::MatrixXd Ad(2, 2);
  Ad << 1, 0, 400, 400;
  SpMat A = from_dense(Ad);
  Vec b(2);
  b << 1, 1;
  RowScaling s = scale_rows(A, b);
  REQUIRE_FALSE(s.is_identity);
  CHECK(s.d[0] == 1.0);
  CHECK(is_power_of_two(s.d[1]));
}

TEST_CASE("dual variables map back through the scaling") {
  Eigen::MatrixXd Ad(1, 1);
  Ad << 64;
  SpMat A = from_dense(Ad);
  Vec b(1);
  b << 128;
  RowScaling s = scale_rows(A, b);
  REQUIRE_FALSE(s.is_identity);
  // scaled row: d*64 x = d*128 -> same solution; original dual y satisfies
  // A' y = w for the scaled dual w at A'_scaled w: y = d .* w
  Vec w(1);
  w << 3;
  Vec y = s.y_to_unscaled(w);
  CHECK(y[0] == s.d[0] * 3);
}
