#pragma once

#include <optional>
#include <string>
#include <vector>

#include "traceprod/poly.hpp"

namespace traceprod {

/// Dense matrix over a FieldCtx, entries stored row-major as element
/// indices. Vector convention throughout: row vectors act on the right
/// (v -> v*A), and conjugation is A^X = X^{-1} A X.
class Matrix {
public:
  Matrix() : f_(nullptr), r_(0), c_(0) {}
  Matrix(const FieldCtx& F, int rows, int cols)
      : f_(&F), r_(rows), c_(cols), e_(size_t(rows) * cols, 0) {}

  static Matrix identity(const FieldCtx& F, int n);
  static Matrix scalar(const FieldCtx& F, int n, uint16_t v);
  /// Companion matrix of a monic polynomial: rows e_2,...,e_d then the
  /// negated coefficient row; e_1 is a cyclic row vector for it.
  static Matrix companion(const Poly& f);
  static Matrix diag(const FieldCtx& F, const std::vector<uint16_t>& d);
  static Matrix direct_sum(const std::vector<Matrix>& blocks);
  /// Row-major integer initializer (reduced mod p); test convenience.
  static Matrix from_ints(const FieldCtx& F, const std::vector<std::vector<int64_t>>& rows);

  const FieldCtx& ctx() const { return *f_; }
  int rows() const { return r_; }
  int cols() const { return c_; }
  bool square() const { return r_ == c_; }

  uint16_t at(int i, int j) const { return e_[size_t(i) * c_ + j]; }
  void set(int i, int j, uint16_t v) { e_[size_t(i) * c_ + j] = v; }
  FieldElement operator()(int i, int j) const { return FieldElement(*f_, at(i, j)); }

  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;
  Matrix scalar_mul(uint16_t s) const;
  Matrix operator-() const { return scalar_mul(f_->neg(1)); }
  bool operator==(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_ && e_ == o.e_; }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  Matrix transpose() const;
  Matrix pow(uint64_t e) const;
  uint16_t trace() const;
  uint16_t det() const;
  int rank() const;
  std::optional<Matrix> inverse_opt() const;
  Matrix inverse() const;

  bool is_zero() const;
  bool is_identity() const;
  bool is_scalar() const;

  Matrix submatrix(int r0, int c0, int h, int w) const;
  void paste(int r0, int c0, const Matrix& b);

  std::vector<uint16_t> row(int i) const;
  void set_row(int i, const std::vector<uint16_t>& v);

  /// X^{-1} * this * X
  Matrix conjugate_by(const Matrix& X) const;

  /// Canonical byte encoding (dims + entries), usable as a hash key.
  std::string encode() const;

  std::string to_text() const;  // human-readable, for diagnostics

private:
  const FieldCtx* f_;
  int r_, c_;
  std::vector<uint16_t> e_;
};

/// Row-vector helpers.
std::vector<uint16_t> vec_mat(const std::vector<uint16_t>& v, const Matrix& A);
uint16_t dot(const FieldCtx& F, const std::vector<uint16_t>& a, const std::vector<uint16_t>& b);

/// Doolittle factorization with L unit lower triangular; exists iff every
/// leading principal minor is nonzero. nullopt encodes the NoLU outcome.
std::optional<std::pair<Matrix, Matrix>> lu_decompose(const Matrix& D);

Poly charpoly(const Matrix& A);
Poly minpoly(const Matrix& A);

/// Evaluate a polynomial at a matrix.
Matrix eval_poly(const Poly& f, const Matrix& A);

}  // namespace traceprod
