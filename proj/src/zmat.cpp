#include "toric/zmat.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace toric {

ZMat ZMat::identity(int n) {
  ZMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

ZMat ZMat::from_columns(const std::vector<ZVec>& cols) {
  if (cols.empty()) return ZMat(0, 0);
  ZMat m(int(cols[0].size()), int(cols.size()));
  for (int j = 0; j < m.cols(); ++j) {
    if (int(cols[j].size()) != m.rows()) throw std::invalid_argument("ragged columns");
    for (int i = 0; i < m.rows(); ++i) m(i, j) = cols[j][i];
  }
  return m;
}

ZMat ZMat::from_rows(const std::vector<ZVec>& rows) {
  if (rows.empty()) return ZMat(0, 0);
  ZMat m(int(rows.size()), int(rows[0].size()));
  for (int i = 0; i < m.rows(); ++i) {
    if (int(rows[i].size()) != m.cols()) throw std::invalid_argument("ragged rows");
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

ZMat ZMat::transposed() const {
  ZMat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

ZVec ZMat::row(int i) const {
  ZVec r(cols_);
  for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
  return r;
}

ZVec ZMat::col(int j) const {
  ZVec c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

ZMat operator*(const ZMat& a, const ZMat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul shape");
  ZMat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const ZZ& aik = a(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

ZVec mul(const ZMat& a, const ZVec& x) {
  if (int(x.size()) != a.cols()) throw std::invalid_argument("matvec shape");
  ZVec y(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

ZZ dot(const ZVec& a, const ZVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot shape");
  ZZ s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_zero(const ZVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

ZZ content(const ZVec& v) {
  ZZ g = 0;
  for (const auto& x : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

ZZ content(const ZMat& m) {
  ZZ g = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m(i, j).get_mpz_t());
      if (g == 1) return g;
    }
  return g;
}

ZVec primitive_part(const ZVec& v) {
  ZZ g = content(v);
  if (g == 0 || g == 1) return v;
  ZVec w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = v[i] / g;
  return w;
}

ZVec negated(const ZVec& v) {
  ZVec w(v.size());
  for (size_t i = 0; i < v.size(); ++i) w[i] = -v[i];
  return w;
}

namespace {

// Rational Gaussian elimination on an augmented system. Returns the rank;
// `a` is reduced in place to row echelon form with recorded pivot columns.
int gauss(std::vector<QVec>& a, std::vector<int>& pivot_cols) {
  int rows = int(a.size());
  int cols = rows ? int(a[0].size()) : 0;
  int r = 0;
  pivot_cols.clear();
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (a[i][c] != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(a[r], a[p]);
    QQ inv = 1 / a[r][c];
    for (int j = c; j < cols; ++j) a[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      QQ f = a[i][c];
      for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  return r;
}

}  // namespace

ZZ det(const ZMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("det: square required");
  int n = a.rows();
  if (n == 0) return 1;
  // Fraction-free (Bareiss) elimination.
  ZMat m = a;
  ZZ prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (m(i, k) != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        ZZ t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        m(i, j) = t / prev;
      }
    prev = m(k, k);
  }
  return sign > 0 ? m(n - 1, n - 1) : -m(n - 1, n - 1);
}

int rank_of(const ZMat& a) {
  std::vector<QVec> q(a.rows(), QVec(a.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) q[i][j] = QQ(a(i, j));
  std::vector<int> piv;
  return gauss(q, piv);
}

namespace {

void row_axpy(ZMat& m, int dst, int src, const ZZ& f) {
  for (int j = 0; j < m.cols(); ++j) m(dst, j) += f * m(src, j);
}

void row_swap(ZMat& m, int i, int k) {
  for (int j = 0; j < m.cols(); ++j) std::swap(m(i, j), m(k, j));
}

void row_negate(ZMat& m, int i) {
  for (int j = 0; j < m.cols(); ++j) m(i, j) = -m(i, j);
}

}  // namespace

ZMat hnf_rows(ZMat a, ZMat* u_out) {
  int rows = a.rows(), cols = a.cols();
  ZMat u = ZMat::identity(rows);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    // Reduce column c below row r to a single pivot by Euclidean steps.
    while (true) {
      int p = -1;
      for (int i = r; i < rows; ++i) {
        if (a(i, c) == 0) continue;
        if (p < 0 || cmp(abs(a(i, c)), abs(a(p, c))) < 0) p = i;
      }
      if (p < 0) break;
      if (p != r) {
        row_swap(a, r, p);
        row_swap(u, r, p);
      }
      bool clean = true;
      for (int i = r + 1; i < rows; ++i) {
        if (a(i, c) == 0) continue;
        ZZ q;
        mpz_fdiv_q(q.get_mpz_t(), a(i, c).get_mpz_t(), a(r, c).get_mpz_t());
        row_axpy(a, i, r, -q);
        row_axpy(u, i, r, -q);
        if (a(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (a(r, c) == 0) continue;
    if (a(r, c) < 0) {
      row_negate(a, r);
      row_negate(u, r);
    }
    for (int i = 0; i < r; ++i) {
      ZZ q;
      mpz_fdiv_q(q.get_mpz_t(), a(i, c).get_mpz_t(), a(r, c).get_mpz_t());
      if (q != 0) {
        row_axpy(a, i, r, -q);
        row_axpy(u, i, r, -q);
      }
    }
    ++r;
  }
  if (u_out) *u_out = u;
  return a;
}

namespace {

void col_axpy(ZMat& m, int dst, int src, const ZZ& f) {
  for (int i = 0; i < m.rows(); ++i) m(i, dst) += f * m(i, src);
}

void col_swap(ZMat& m, int a, int b) {
  for (int i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

}  // namespace

void snf(const ZMat& a, ZMat& s, ZMat& u, ZMat& v) {
  s = a;
  u = ZMat::identity(a.rows());
  v = ZMat::identity(a.cols());
  int n = std::min(a.rows(), a.cols());
  for (int t = 0; t < n; ++t) {
    while (true) {
      // Pick the smallest nonzero entry of the trailing block as pivot.
      int pi = -1, pj = -1;
      for (int i = t; i < s.rows(); ++i)
        for (int j = t; j < s.cols(); ++j) {
          if (s(i, j) == 0) continue;
          if (pi < 0 || cmp(abs(s(i, j)), abs(s(pi, pj))) < 0) {
            pi = i;
            pj = j;
          }
        }
      if (pi < 0) break;
      if (pi != t) {
        row_swap(s, t, pi);
        row_swap(u, t, pi);
      }
      if (pj != t) {
        col_swap(s, t, pj);
        col_swap(v, t, pj);
      }
      bool dirty = false;
      for (int i = t + 1; i < s.rows(); ++i) {
        if (s(i, t) == 0) continue;
        ZZ q;
        mpz_fdiv_q(q.get_mpz_t(), s(i, t).get_mpz_t(), s(t, t).get_mpz_t());
        row_axpy(s, i, t, -q);
        row_axpy(u, i, t, -q);
        if (s(i, t) != 0) dirty = true;
      }
      for (int j = t + 1; j < s.cols(); ++j) {
        if (s(t, j) == 0) continue;
        ZZ q;
        mpz_fdiv_q(q.get_mpz_t(), s(t, j).get_mpz_t(), s(t, t).get_mpz_t());
        col_axpy(s, j, t, -q);
        col_axpy(v, j, t, -q);
        if (s(t, j) != 0) dirty = true;
      }
      if (dirty) continue;
      // Divisibility fix-up: fold any non-divisible entry into the pivot row.
      bool fixed = true;
      for (int i = t + 1; i < s.rows() && fixed; ++i)
        for (int j = t + 1; j < s.cols() && fixed; ++j)
          if (s(i, j) % s(t, t) != 0) {
            row_axpy(s, t, i, 1);
            row_axpy(u, t, i, 1);
            fixed = false;
          }
      if (fixed) break;
    }
    if (t < std::min(s.rows(), s.cols()) && s(t, t) < 0) {
      row_negate(s, t);
      row_negate(u, t);
    }
  }
}

ZMat kernel_basis(const ZMat& a) {
  ZMat s, u, v;
  snf(a, s, u, v);
  int n = a.cols();
  int r = 0;
  for (int i = 0; i < std::min(s.rows(), s.cols()); ++i)
    if (s(i, i) != 0) ++r;
  ZMat k(n, n - r);
  for (int j = r; j < n; ++j)
    for (int i = 0; i < n; ++i) k(i, j - r) = v(i, j);
  return k;
}

ZMat right_inverse(const ZMat& p) {
  ZMat s, u, v;
  snf(p, s, u, v);
  int r = p.rows();
  if (p.cols() < r) throw std::invalid_argument("right_inverse: wide matrix required");
  for (int i = 0; i < r; ++i)
    if (s(i, i) != 1) throw std::invalid_argument("right_inverse: not surjective over Z");
  // P = U^-1 S V^-1, so L = V * E * U with E the cols x rows unit block.
  ZMat e(p.cols(), r);
  for (int i = 0; i < r; ++i) e(i, i) = 1;
  return v * e * u;
}

std::optional<ZMat> inverse_unimodular(const ZMat& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  ZZ d = det(a);
  if (d != 1 && d != -1) return std::nullopt;
  int n = a.rows();
  std::vector<QVec> aug(n, QVec(2 * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i][j] = QQ(a(i, j));
    aug[i][n + i] = 1;
  }
  std::vector<int> piv;
  if (gauss(aug, piv) != n) return std::nullopt;
  ZMat inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      QQ q = aug[i][n + j];
      if (q.get_den() != 1) return std::nullopt;
      inv(i, j) = q.get_num();
    }
  return inv;
}

std::optional<ZMat> solve_left_integer(const ZMat& a, const ZMat& b) {
  // X*A = B  <=>  A^T X^T = B^T, solved column by column.
  if (a.rows() != a.cols() || b.cols() != a.rows()) return std::nullopt;
  int n = a.rows();
  ZMat at = a.transposed();
  ZMat x(b.rows(), n);
  for (int r = 0; r < b.rows(); ++r) {
    QVec rhs(n);
    for (int j = 0; j < n; ++j) rhs[j] = QQ(b(r, j));
    auto sol = solve_rational(at, rhs);
    if (!sol) return std::nullopt;
    for (int j = 0; j < n; ++j) {
      if ((*sol)[j].get_den() != 1) return std::nullopt;
      x(r, j) = (*sol)[j].get_num();
    }
  }
  return x;
}

std::optional<QVec> solve_rational(const ZMat& a, const QVec& b) {
  if (a.rows() != a.cols() || int(b.size()) != a.rows()) return std::nullopt;
  int n = a.rows();
  std::vector<QVec> aug(n, QVec(n + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i][j] = QQ(a(i, j));
    aug[i][n] = b[i];
  }
  std::vector<int> piv;
  if (gauss(aug, piv) != n) return std::nullopt;
  QVec x(n);
  for (int i = 0; i < n; ++i) x[i] = aug[i][n];
  return x;
}

std::int64_t to_i64(const ZZ& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer out of 64-bit range");
  return z.get_si();
}

IVec to_i64(const ZVec& v) {
  IVec out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = to_i64(v[i]);
  return out;
}

std::vector<IVec> rows_i64(const ZMat& m) {
  std::vector<IVec> out(m.rows(), IVec(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i][j] = to_i64(m(i, j));
  return out;
}

std::string to_string(const ZVec& v) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i].get_str();
  }
  os << "]";
  return os.str();
}

}  // namespace toric
