#pragma once

#include <string>
#include <utility>
#include <vector>

#include "traceprod/field.hpp"

namespace traceprod {

/// Dense univariate polynomial over a FieldCtx, coefficients stored
/// constant-first. The zero polynomial has an empty coefficient vector
/// and degree -1.
class Poly {
public:
  explicit Poly(const FieldCtx& F) : f_(&F) {}
  Poly(const FieldCtx& F, std::vector<uint16_t> coeffs) : f_(&F), c_(std::move(coeffs)) { trim(); }

  static Poly zero(const FieldCtx& F) { return Poly(F); }
  static Poly constant(const FieldCtx& F, uint16_t v) { return Poly(F, {v}); }
  static Poly x(const FieldCtx& F) { return Poly(F, {0, 1}); }
  /// x - a
  static Poly linear(const FieldCtx& F, uint16_t a) { return Poly(F, {F.neg(a), 1}); }
  static Poly from_ints(const FieldCtx& F, const std::vector<int64_t>& cs);

  const FieldCtx& ctx() const { return *f_; }
  int degree() const { return int(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  uint16_t coeff(int i) const { return (i >= 0 && i < int(c_.size())) ? c_[i] : 0; }
  uint16_t lead() const { return c_.empty() ? 0 : c_.back(); }
  const std::vector<uint16_t>& coeffs() const { return c_; }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(uint16_t s) const;
  bool operator==(const Poly& o) const { return c_ == o.c_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  /// Quotient and remainder; divisor must have invertible leading coefficient.
  std::pair<Poly, Poly> divmod(const Poly& d) const;
  Poly operator%(const Poly& d) const { return divmod(d).second; }
  Poly operator/(const Poly& d) const { return divmod(d).first; }
  bool divides(const Poly& g) const;  // this | g

  Poly monic() const;
  Poly pow(uint32_t e) const;
  uint16_t eval(uint16_t a) const;

  bool is_irreducible() const;
  /// Irreducible factorization, factors sorted by (degree, coeff index),
  /// as (factor, exponent) pairs.
  std::vector<std::pair<Poly, int>> factor() const;

  std::string to_text(const std::string& var = "x") const;

  /// Canonical integer key (base-q digits of coefficients).
  std::vector<uint32_t> key() const;

private:
  const FieldCtx* f_;
  std::vector<uint16_t> c_;

  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
};

Poly gcd(const Poly& a, const Poly& b);
Poly lcm(const Poly& a, const Poly& b);

/// All monic polynomials of exact degree d, ordered by coefficient index.
std::vector<Poly> monic_polys(const FieldCtx& F, int d);
std::vector<Poly> monic_irreducibles(const FieldCtx& F, int d);

}  // namespace traceprod
