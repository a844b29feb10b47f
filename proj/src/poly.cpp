#include "traceprod/poly.hpp"

#include <algorithm>
#include <sstream>

namespace traceprod {

Poly Poly::from_ints(const FieldCtx& F, const std::vector<int64_t>& cs) {
  std::vector<uint16_t> c(cs.size());
  for (size_t i = 0; i < cs.size(); ++i) c[i] = F.from_int(cs[i]);
  return Poly(F, std::move(c));
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<uint16_t> r(std::max(c_.size(), o.c_.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) r[i] = f_->add(coeff(int(i)), o.coeff(int(i)));
  return Poly(*f_, std::move(r));
}

Poly Poly::operator-(const Poly& o) const {
  std::vector<uint16_t> r(std::max(c_.size(), o.c_.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) r[i] = f_->sub(coeff(int(i)), o.coeff(int(i)));
  return Poly(*f_, std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return Poly(*f_);
  std::vector<uint16_t> r(c_.size() + o.c_.size() - 1, 0);
  for (size_t i = 0; i < c_.size(); ++i) {
    if (!c_[i]) continue;
    const uint16_t* row = f_->mul_row(c_[i]);
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] = f_->add(r[i + j], row[o.c_[j]]);
  }
  return Poly(*f_, std::move(r));
}

Poly Poly::operator*(uint16_t s) const {
  std::vector<uint16_t> r(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) r[i] = f_->mul(c_[i], s);
  return Poly(*f_, std::move(r));
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
  if (d.is_zero()) throw Error(Err::DivisionByZero, "polynomial division by zero");
  std::vector<uint16_t> rem = c_;
  int dd = d.degree();
  uint16_t linv = f_->inv(d.lead());
  if (int(rem.size()) - 1 < dd) return {Poly(*f_), Poly(*f_, std::move(rem))};
  std::vector<uint16_t> quo(rem.size() - dd, 0);
  for (int i = int(rem.size()) - 1; i >= dd; --i) {
    uint16_t q = f_->mul(rem[i], linv);
    if (!q) continue;
    quo[i - dd] = q;
    for (int j = 0; j <= dd; ++j) rem[i - dd + j] = f_->sub(rem[i - dd + j], f_->mul(q, d.c_[j]));
  }
  return {Poly(*f_, std::move(quo)), Poly(*f_, std::move(rem))};
}

bool Poly::divides(const Poly& g) const {
  if (is_zero()) return g.is_zero();
  return g.divmod(*this).second.is_zero();
}

Poly Poly::monic() const {
  if (is_zero() || c_.back() == 1) return *this;
  return *this * f_->inv(c_.back());
}

Poly Poly::pow(uint32_t e) const {
  Poly r = Poly::constant(*f_, 1);
  Poly b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

uint16_t Poly::eval(uint16_t a) const {
  uint16_t acc = 0;
  for (int i = degree(); i >= 0; --i) acc = f_->add(f_->mul(acc, a), c_[i]);
  return acc;
}

bool Poly::is_irreducible() const {
  int d = degree();
  if (d <= 0) return false;
  if (d == 1) return true;
  for (int e = 1; 2 * e <= d; ++e)
    for (const Poly& g : monic_polys(*f_, e))
      if (g.degree() >= 1 && g.divides(*this)) return false;
  return true;
}

std::vector<std::pair<Poly, int>> Poly::factor() const {
  std::vector<std::pair<Poly, int>> out;
  Poly rest = monic();
  if (rest.degree() < 1) return out;
  for (int e = 1; e <= rest.degree(); ++e) {
    if (e > rest.degree()) break;
    for (const Poly& g : monic_polys(*f_, e)) {
      if (rest.degree() < e) break;
      if (!g.is_irreducible()) continue;
      int mult = 0;
      while (g.divides(rest)) {
        rest = rest / g;
        ++mult;
      }
      if (mult) out.push_back({g, mult});
    }
  }
  if (rest.degree() >= 1) out.push_back({rest, 1});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
    return a.first.key() < b.first.key();
  });
  return out;
}

std::string Poly::to_text(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  const FieldCtx& F = *f_;
  for (int i = degree(); i >= 0; --i) {
    uint16_t c = coeff(i);
    if (!c) continue;
    if (!first) os << '+';
    first = false;
    bool unit = (c == 1);
    if (i == 0 || !unit) os << F.elem_text(c);
    if (i > 0) {
      if (!unit) os << '*';
      os << var;
      if (i > 1) os << '^' << i;
    }
  }
  return os.str();
}

std::vector<uint32_t> Poly::key() const {
  std::vector<uint32_t> k;
  k.push_back(uint32_t(degree() + 1));
  for (auto c : c_) k.push_back(c);
  return k;
}

Poly gcd(const Poly& a, const Poly& b) {
  Poly x = a, y = b;
  while (!y.is_zero()) {
    Poly r = x % y;
    x = y;
    y = r;
  }
  return x.monic();
}

Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly(a.ctx());
  Poly g = gcd(a, b);
  return ((a * b) / g).monic();
}

std::vector<Poly> monic_polys(const FieldCtx& F, int d) {
  uint64_t count = 1;
  for (int i = 0; i < d; ++i) count *= F.order();
  std::vector<Poly> out;
  out.reserve(count);
  for (uint64_t idx = 0; idx < count; ++idx) {
    std::vector<uint16_t> c(d + 1, 0);
    uint64_t t = idx;
    for (int i = 0; i < d; ++i) {
      c[i] = uint16_t(t % F.order());
      t /= F.order();
    }
    c[d] = 1;
    out.push_back(Poly(F, std::move(c)));
  }
  return out;
}

std::vector<Poly> monic_irreducibles(const FieldCtx& F, int d) {
  std::vector<Poly> out;
  for (const Poly& f : monic_polys(F, d))
    if (f.is_irreducible()) out.push_back(f);
  return out;
}

}  // namespace traceprod
