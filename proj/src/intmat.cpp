#include "intmat.h"

#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace fp {

namespace {

i64 addq(i64 x, i64 y) {
  i64 r;
  if (__builtin_add_overflow(x, y, &r)) {
    std::fprintf(stderr, "intmat: integer overflow in add\n");
    std::abort();
  }
  return r;
}

i64 mulq(i64 x, i64 y) {
  i64 r;
  if (__builtin_mul_overflow(x, y, &r)) {
    std::fprintf(stderr, "intmat: integer overflow in mul\n");
    std::abort();
  }
  return r;
}

} // namespace

Mat Mat::identity(int n) {
  Mat I(n, n);
  for (int i = 0; i < n; ++i) I.at(i, i) = 1;
  return I;
}

Mat mat_mul(const Mat& A, const Mat& B) {
  Mat C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      i64 v = A.at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < B.cols; ++j) C.at(i, j) = addq(C.at(i, j), mulq(v, B.at(k, j)));
    }
  return C;
}

Mat transpose(const Mat& A) {
  Mat T(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
  return T;
}

i64 det(const Mat& A) {
  // Bareiss: exact integer elimination, previous pivot divides exactly
  int n = A.rows;
  Mat M = A;
  i64 prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (M.at(k, k) == 0) {
      int s = -1;
      for (int i = k + 1; i < n; ++i)
        if (M.at(i, k) != 0) {
          s = i;
          break;
        }
      if (s < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(M.at(k, j), M.at(s, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        M.at(i, j) = (mulq(M.at(i, j), M.at(k, k)) - mulq(M.at(i, k), M.at(k, j))) / prev;
    prev = M.at(k, k);
  }
  return sign * M.at(n - 1, n - 1);
}

bool is_unimodular(const Mat& A) {
  if (A.rows != A.cols) return false;
  i64 d = det(A);
  return d == 1 || d == -1;
}

namespace {

// Elementary operations applied to S with all four transforms kept in sync:
// P S-side row ops, Q column ops, and the inverses via the opposite side.
struct Tracker {
  Mat S, P, Q, Pinv, Qinv;

  explicit Tracker(const Mat& A)
      : S(A),
        P(Mat::identity(A.rows)),
        Q(Mat::identity(A.cols)),
        Pinv(Mat::identity(A.rows)),
        Qinv(Mat::identity(A.cols)) {}

  void row_swap(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < S.cols; ++c) std::swap(S.at(i, c), S.at(j, c));
    for (int c = 0; c < P.cols; ++c) std::swap(P.at(i, c), P.at(j, c));
    for (int r = 0; r < Pinv.rows; ++r) std::swap(Pinv.at(r, i), Pinv.at(r, j));
  }
  void col_swap(int i, int j) {
    if (i == j) return;
    for (int r = 0; r < S.rows; ++r) std::swap(S.at(r, i), S.at(r, j));
    for (int r = 0; r < Q.rows; ++r) std::swap(Q.at(r, i), Q.at(r, j));
    for (int c = 0; c < Qinv.cols; ++c) std::swap(Qinv.at(i, c), Qinv.at(j, c));
  }
  void row_neg(int i) {
    for (int c = 0; c < S.cols; ++c) S.at(i, c) = -S.at(i, c);
    for (int c = 0; c < P.cols; ++c) P.at(i, c) = -P.at(i, c);
    for (int r = 0; r < Pinv.rows; ++r) Pinv.at(r, i) = -Pinv.at(r, i);
  }
  // row i += k * row j
  void row_add(int i, int j, i64 k) {
    if (k == 0) return;
    for (int c = 0; c < S.cols; ++c) S.at(i, c) = addq(S.at(i, c), mulq(k, S.at(j, c)));
    for (int c = 0; c < P.cols; ++c) P.at(i, c) = addq(P.at(i, c), mulq(k, P.at(j, c)));
    for (int r = 0; r < Pinv.rows; ++r) Pinv.at(r, j) = addq(Pinv.at(r, j), mulq(-k, Pinv.at(r, i)));
  }
  // col j += k * col i
  void col_add(int j, int i, i64 k) {
    if (k == 0) return;
    for (int r = 0; r < S.rows; ++r) S.at(r, j) = addq(S.at(r, j), mulq(k, S.at(r, i)));
    for (int r = 0; r < Q.rows; ++r) Q.at(r, j) = addq(Q.at(r, j), mulq(k, Q.at(r, i)));
    for (int c = 0; c < Qinv.cols; ++c) Qinv.at(i, c) = addq(Qinv.at(i, c), mulq(-k, Qinv.at(j, c)));
  }
};

} // namespace

SmithResult smith_normal_form(const Mat& A) {
  Tracker T(A);
  Mat& S = T.S;
  int n = std::min(A.rows, A.cols);
  int t = 0;
  while (t < n) {
    // pick the nonzero entry of least magnitude in the remaining block
    int pi = -1, pj = -1;
    i64 best = 0;
    for (int i = t; i < S.rows; ++i)
      for (int j = t; j < S.cols; ++j) {
        i64 v = S.at(i, j) < 0 ? -S.at(i, j) : S.at(i, j);
        if (v != 0 && (pi < 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;
    T.row_swap(t, pi);
    T.col_swap(t, pj);
    if (S.at(t, t) < 0) T.row_neg(t);

    bool clean = true;
    for (int i = t + 1; i < S.rows; ++i) {
      i64 q = S.at(i, t) / S.at(t, t);
      T.row_add(i, t, -q);
      if (S.at(i, t) != 0) clean = false;
    }
    for (int j = t + 1; j < S.cols; ++j) {
      i64 q = S.at(t, j) / S.at(t, t);
      T.col_add(j, t, -q);
      if (S.at(t, j) != 0) clean = false;
    }
    if (!clean) continue; // smaller remainders appeared; re-pick the pivot

    // divisibility: fold any non-multiple into the pivot's column and retry
    bool divides = true;
    for (int i = t + 1; i < S.rows && divides; ++i)
      for (int j = t + 1; j < S.cols && divides; ++j)
        if (S.at(i, j) % S.at(t, t) != 0) {
          T.row_add(t, i, 1);
          divides = false;
        }
    if (!divides) continue;
    ++t;
  }
  SmithResult R;
  R.S = S;
  R.P = T.P;
  R.Q = T.Q;
  R.Pinv = T.Pinv;
  R.Qinv = T.Qinv;
  R.rank = t;
  for (int i = 0; i < t; ++i) R.diag.push_back(S.at(i, i));
  return R;
}

HnfResult hermite_normal_form(const Mat& A) {
  Mat H = A;
  Mat U = Mat::identity(A.rows);
  auto row_add = [&](int i, int j, i64 k) {
    if (k == 0) return;
    for (int c = 0; c < H.cols; ++c) H.at(i, c) = addq(H.at(i, c), mulq(k, H.at(j, c)));
    for (int c = 0; c < U.cols; ++c) U.at(i, c) = addq(U.at(i, c), mulq(k, U.at(j, c)));
  };
  auto row_swap = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < H.cols; ++c) std::swap(H.at(i, c), H.at(j, c));
    for (int c = 0; c < U.cols; ++c) std::swap(U.at(i, c), U.at(j, c));
  };
  auto row_neg = [&](int i) {
    for (int c = 0; c < H.cols; ++c) H.at(i, c) = -H.at(i, c);
    for (int c = 0; c < U.cols; ++c) U.at(i, c) = -U.at(i, c);
  };

  int r = 0;
  std::vector<int> pivots;
  for (int c = 0; c < H.cols && r < H.rows; ++c) {
    // euclid the column below r down to one nonzero entry
    while (true) {
      int nz = -1;
      i64 best = 0;
      for (int i = r; i < H.rows; ++i) {
        i64 v = H.at(i, c) < 0 ? -H.at(i, c) : H.at(i, c);
        if (v != 0 && (nz < 0 || v < best)) {
          best = v;
          nz = i;
        }
      }
      if (nz < 0) break;
      row_swap(r, nz);
      bool done = true;
      for (int i = r + 1; i < H.rows; ++i) {
        i64 q = H.at(i, c) / H.at(r, c);
        row_add(i, r, -q);
        if (H.at(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (r < H.rows && H.at(r, c) != 0) {
      if (H.at(r, c) < 0) row_neg(r);
      // reduce entries above the pivot into [0, pivot)
      for (int i = 0; i < r; ++i) {
        i64 q = H.at(i, c) / H.at(r, c);
        if (H.at(i, c) % H.at(r, c) < 0) --q;
        row_add(i, r, -q);
      }
      pivots.push_back(c);
      ++r;
    }
  }
  HnfResult R;
  R.H = H;
  R.U = U;
  R.rank = r;
  R.pivot_col = pivots;
  return R;
}

std::optional<std::vector<i64>> in_row_lattice(const HnfResult& H, const std::vector<i64>& v) {
  std::vector<i64> rem = v;
  std::vector<i64> coef(H.rank, 0);
  for (int i = 0; i < H.rank; ++i) {
    int c = H.pivot_col[i];
    i64 p = H.H.at(i, c);
    if (rem[c] % p != 0) return std::nullopt;
    i64 k = rem[c] / p;
    coef[i] = k;
    for (int j = 0; j < H.H.cols; ++j) rem[j] -= mulq(k, H.H.at(i, j));
  }
  for (i64 x : rem)
    if (x != 0) return std::nullopt;
  return coef;
}

i64 minor_gcd(const Mat& A, int k) {
  // enumerate k-subsets of rows and columns
  std::vector<int> ri(k), ci(k);
  i64 g = 0;
  auto choose = [&](auto&& self, std::vector<int>& idx, int pos, int lo, int limit,
                    const auto& body) -> void {
    if (pos == k) {
      body();
      return;
    }
    for (int v = lo; v <= limit - (k - pos); ++v) {
      idx[pos] = v;
      self(self, idx, pos + 1, v + 1, limit, body);
    }
  };
  choose(
      choose, ri, 0, 0, A.rows,
      [&] {
        choose(
            choose, ci, 0, 0, A.cols,
            [&] {
              Mat M(k, k);
              for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) M.at(i, j) = A.at(ri[i], ci[j]);
              g = std::gcd(g, det(M));
            });
      });
  return g;
}

} // namespace fp
