#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace fp {

using i64 = std::int64_t;

// Dense row-major integer matrix. All arithmetic is overflow-checked and
// aborts on wraparound; the lattices here are tiny.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<i64> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a((size_t)r * c, 0) {}
  i64& at(int r, int c) { return a[(size_t)r * cols + c]; }
  i64 at(int r, int c) const { return a[(size_t)r * cols + c]; }
  static Mat identity(int n);
  friend bool operator==(const Mat&, const Mat&) = default;
};

Mat mat_mul(const Mat& A, const Mat& B);
Mat transpose(const Mat& A);

// Bareiss fraction-free determinant; square input only.
i64 det(const Mat& A);
bool is_unimodular(const Mat& A);

// P*A*Q = S diagonal with d1 | d2 | ... | dr > 0; Pinv*S*Qinv = A.
// All four transforms are unimodular.
struct SmithResult {
  Mat S, P, Q, Pinv, Qinv;
  std::vector<i64> diag; // the nonzero invariant factors
  int rank = 0;
};
SmithResult smith_normal_form(const Mat& A);

// Row-style Hermite normal form: U*A = H with U unimodular, H's nonzero rows
// staircase-shaped with positive pivots and entries above a pivot reduced.
struct HnfResult {
  Mat H, U;
  int rank = 0;
  std::vector<int> pivot_col; // one per nonzero row
};
HnfResult hermite_normal_form(const Mat& A);

// Integer coordinates of v in the row lattice of H (H in row HNF), if any.
std::optional<std::vector<i64>> in_row_lattice(const HnfResult& H, const std::vector<i64>& v);

// gcd of all k x k minors (0 if all vanish); brute force, small inputs only.
i64 minor_gcd(const Mat& A, int k);

} // namespace fp
