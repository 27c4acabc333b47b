#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace toric {

using ZZ = mpz_class;
using QQ = mpq_class;
using ZVec = std::vector<ZZ>;
using QVec = std::vector<QQ>;
using IVec = std::vector<std::int64_t>;

// Dense integer matrix with exact (GMP) entries. Used for all lattice
// algebra where intermediate coefficient growth must not overflow.
class ZMat {
 public:
  ZMat() = default;
  ZMat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * size_t(cols)) {}

  static ZMat identity(int n);
  static ZMat from_columns(const std::vector<ZVec>& cols);
  static ZMat from_rows(const std::vector<ZVec>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  ZZ& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const ZZ& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  ZMat transposed() const;
  ZVec row(int i) const;
  ZVec col(int j) const;

  bool operator==(const ZMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<ZZ> a_;
};

ZMat operator*(const ZMat& a, const ZMat& b);
ZVec mul(const ZMat& a, const ZVec& x);

ZZ dot(const ZVec& a, const ZVec& b);
bool is_zero(const ZVec& v);
ZZ content(const ZVec& v);          // gcd of entries, 0 for the zero vector
ZZ content(const ZMat& m);
ZVec primitive_part(const ZVec& v); // v / content(v); zero vector unchanged
ZVec negated(const ZVec& v);

ZZ det(const ZMat& a);              // exact, square matrices
int rank_of(const ZMat& a);

// Row-style Hermite normal form: returns H with H = U*A for unimodular U
// (optionally reported). Pivots positive, entries above a pivot reduced
// into [0, pivot). Zero rows sink to the bottom.
ZMat hnf_rows(ZMat a, ZMat* u_out = nullptr);

// Smith normal form: S = U*A*V with U, V unimodular and S diagonal with
// the divisibility chain.
void snf(const ZMat& a, ZMat& s, ZMat& u, ZMat& v);

// Saturated basis of the integer kernel of A (as a map Z^cols -> Z^rows),
// returned as matrix columns. May have zero columns.
ZMat kernel_basis(const ZMat& a);

// For a surjective P (rows x cols, rows <= cols) with saturated kernel,
// returns L with P*L = I. Throws if P is not surjective over Z.
ZMat right_inverse(const ZMat& p);

std::optional<ZMat> inverse_unimodular(const ZMat& a);

// Solves X*A = B over the rationals (A square, nonsingular) and returns X
// if it is integral; nullopt if A is singular or X has a denominator.
std::optional<ZMat> solve_left_integer(const ZMat& a, const ZMat& b);

// Unique rational solution of A*x = b for square nonsingular A.
std::optional<QVec> solve_rational(const ZMat& a, const QVec& b);

// 64-bit conversions for evaluation-side code. Throws on overflow.
std::int64_t to_i64(const ZZ& z);
IVec to_i64(const ZVec& v);
std::vector<IVec> rows_i64(const ZMat& m);

std::string to_string(const ZVec& v);

}  // namespace toric
