#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "intmat.h"

#include <random>

using namespace fp;

namespace {

Mat random_mat(std::mt19937& rng, int r, int c, int span = 5) {
  std::uniform_int_distribution<int> d(-span, span);
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M.at(i, j) = d(rng);
  return M;
}

} // namespace

TEST_CASE("determinant basics") {
  Mat I = Mat::identity(4);
  CHECK(det(I) == 1);
  Mat M(2, 2);
  M.at(0, 0) = 3;
  M.at(0, 1) = 7;
  M.at(1, 0) = 1;
  M.at(1, 1) = 4;
  CHECK(det(M) == 5);
  Mat S(2, 2);
  S.at(0, 0) = 2;
  S.at(0, 1) = 4;
  S.at(1, 0) = 1;
  S.at(1, 1) = 2;
  CHECK(det(S) == 0);
}

TEST_CASE("smith normal form invariants") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    int r = 1 + (int)(rng() % 4), c = 1 + (int)(rng() % 4);
    Mat A = random_mat(rng, r, c);
    auto R = smith_normal_form(A);
    CHECK(mat_mul(mat_mul(R.P, A), R.Q) == R.S);
    CHECK(mat_mul(mat_mul(R.Pinv, R.S), R.Qinv) == A);
    CHECK(mat_mul(R.P, R.Pinv) == Mat::identity(r));
    CHECK(mat_mul(R.Q, R.Qinv) == Mat::identity(c));
    CHECK(is_unimodular(R.P));
    CHECK(is_unimodular(R.Q));
    for (size_t i = 0; i + 1 < R.diag.size(); ++i) {
      CHECK(R.diag[i] > 0);
      CHECK(R.diag[i + 1] % R.diag[i] == 0);
    }
    // off-diagonal entries all vanish
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        if (i != j) CHECK(R.S.at(i, j) == 0);
    // product of invariant factors = gcd of rank-sized minors
    if (R.rank > 0) {
      i64 prod = 1;
      for (i64 d : R.diag) prod *= d;
      CHECK(prod == minor_gcd(A, R.rank));
    }
    CHECK(minor_gcd(A, R.rank + 1) == 0);
  }
}

TEST_CASE("hermite normal form invariants") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    int r = 1 + (int)(rng() % 4), c = 1 + (int)(rng() % 4);
    Mat A = random_mat(rng, r, c);
    auto H = hermite_normal_form(A);
    CHECK(mat_mul(H.U, A) == H.H);
    CHECK(is_unimodular(H.U));
    CHECK(H.rank == smith_normal_form(A).rank);
    // staircase with positive pivots, reduced entries above
    for (int i = 0; i < H.rank; ++i) {
      int p = H.pivot_col[i];
      CHECK(H.H.at(i, p) > 0);
      for (int j = 0; j < p; ++j) CHECK(H.H.at(i, j) == 0);
      for (int k = 0; k < i; ++k) {
        CHECK(H.H.at(k, p) >= 0);
        CHECK(H.H.at(k, p) < H.H.at(i, p));
      }
    }
    for (int i = H.rank; i < r; ++i)
      for (int j = 0; j < c; ++j) CHECK(H.H.at(i, j) == 0);
    // rows of A lie in the row lattice of H, with exact coordinates
    for (int i = 0; i < r; ++i) {
      std::vector<i64> v(c);
      for (int j = 0; j < c; ++j) v[j] = A.at(i, j);
      auto coef = in_row_lattice(H, v);
      REQUIRE(coef.has_value());
      std::vector<i64> back(c, 0);
      for (int k = 0; k < H.rank; ++k)
        for (int j = 0; j < c; ++j) back[j] += (*coef)[k] * H.H.at(k, j);
      CHECK(back == v);
    }
  }
}

TEST_CASE("lattice membership rejects outsiders") {
  // lattice spanned by (2,0) and (0,3)
  Mat A(2, 2);
  A.at(0, 0) = 2;
  A.at(1, 1) = 3;
  auto H = hermite_normal_form(A);
  CHECK(in_row_lattice(H, {4, 3}).has_value());
  CHECK_FALSE(in_row_lattice(H, {1, 0}).has_value());
  CHECK_FALSE(in_row_lattice(H, {2, 2}).has_value());
  // and a non-full-rank case
  Mat B(1, 3);
  B.at(0, 0) = 2;
  B.at(0, 1) = 4;
  B.at(0, 2) = 6;
  auto HB = hermite_normal_form(B);
  CHECK(in_row_lattice(HB, {4, 8, 12}).has_value());
  CHECK_FALSE(in_row_lattice(HB, {2, 4, 7}).has_value());
  CHECK_FALSE(in_row_lattice(HB, {1, 2, 3}).has_value());
}
