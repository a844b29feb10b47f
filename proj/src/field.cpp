#include "traceprod/field.hpp"

#include <algorithm>
#include <sstream>

namespace traceprod {

const char* err_name(Err e) {
  switch (e) {
    case Err::NotPrime: return "NotPrime";
    case Err::ReducibleModulus: return "ReducibleModulus";
    case Err::FieldTooLarge: return "FieldTooLarge";
    case Err::DivisionByZero: return "DivisionByZero";
    case Err::MixedFields: return "MixedFields";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::Singular: return "Singular";
    case Err::NoLU: return "NoLU";
    case Err::NotCyclic: return "NotCyclic";
    case Err::DegenerateBasis: return "DegenerateBasis";
    case Err::DetNotOne: return "DetNotOne";
    case Err::ScalarClass: return "ScalarClass";
    case Err::IrreducibleOmega: return "IrreducibleOmega";
    case Err::HypothesisViolated: return "HypothesisViolated";
    case Err::PreconditionViolated: return "PreconditionViolated";
    case Err::EmbedSearchFailed: return "EmbedSearchFailed";
    case Err::MrTooSmall: return "MrTooSmall";
    case Err::SolveFailed: return "SolveFailed";
    case Err::ConstructionFailed: return "ConstructionFailed";
    case Err::InternalInconsistency: return "InternalInconsistency";
    case Err::UnsupportedCase: return "UnsupportedCase";
    case Err::BudgetExceeded: return "BudgetExceeded";
    case Err::TooLarge: return "TooLarge";
    case Err::ParseError: return "ParseError";
    case Err::Usage: return "Usage";
  }
  return "Unknown";
}

namespace {

bool is_prime(uint32_t p) {
  if (p < 2) return false;
  for (uint32_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Dense polynomials over GF(p) with plain integer coefficients, used only
// to set up the modulus before the lookup tables exist.
using PP = std::vector<uint32_t>;

PP pp_trim(PP a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

PP pp_mod(PP a, const PP& m, uint32_t p) {
  a = pp_trim(std::move(a));
  while (a.size() >= m.size()) {
    uint32_t lead = a.back();  // m monic
    size_t shift = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i) {
      uint64_t t = uint64_t(lead) * m[i] % p;
      a[i + shift] = uint32_t((a[i + shift] + p - t) % p);
    }
    a = pp_trim(std::move(a));
  }
  return a;
}

PP pp_mul(const PP& a, const PP& b, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  PP r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = uint32_t((r[i + j] + uint64_t(a[i]) * b[j]) % p);
  return r;
}

// trial division by all monic polynomials of degree 1..deg/2
bool pp_irreducible(const PP& f, uint32_t p) {
  size_t deg = f.size() - 1;
  if (deg == 0) return false;
  if (deg == 1) return true;
  for (size_t d = 1; 2 * d <= deg; ++d) {
    uint64_t count = 1;
    for (size_t i = 0; i < d; ++i) count *= p;
    for (uint64_t idx = 0; idx < count; ++idx) {
      PP g(d + 1, 0);
      uint64_t t = idx;
      for (size_t i = 0; i < d; ++i) {
        g[i] = uint32_t(t % p);
        t /= p;
      }
      g[d] = 1;
      if (pp_mod(f, g, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace

FieldCtx::FieldCtx(uint32_t p, uint32_t k, std::optional<std::vector<uint32_t>> modulus,
                   uint32_t max_order)
    : p_(p), k_(k) {
  if (!is_prime(p)) throw Error(Err::NotPrime, std::to_string(p) + " is not prime");
  if (k < 1) throw Error(Err::Usage, "extension degree must be >= 1");
  uint64_t q = 1;
  for (uint32_t i = 0; i < k; ++i) {
    q *= p;
    if (q > kHardMaxOrder) throw Error(Err::FieldTooLarge, "p^k exceeds hard cap");
  }
  if (q > std::min<uint64_t>(max_order, kHardMaxOrder))
    throw Error(Err::FieldTooLarge, "p^k = " + std::to_string(q) + " exceeds bound");
  q_ = uint32_t(q);

  if (modulus) {
    if (modulus->size() != k + 1 || (*modulus)[k] != 1)
      throw Error(Err::ReducibleModulus, "modulus must be monic of degree k");
    for (auto& c : *modulus)
      if (c >= p) throw Error(Err::ReducibleModulus, "modulus coefficient out of range");
    if (k >= 1 && !pp_irreducible(*modulus, p))
      throw Error(Err::ReducibleModulus, "modulus is reducible");
    modulus_ = *modulus;
  } else if (k == 1) {
    modulus_ = {0, 1};  // x
  } else {
    // smallest irreducible by coefficient-tuple index
    for (uint32_t idx = 0;; ++idx) {
      if (idx >= q_) throw Error(Err::InternalInconsistency, "no irreducible found");
      PP f(k + 1, 0);
      uint32_t t = idx;
      for (uint32_t i = 0; i < k; ++i) {
        f[i] = t % p;
        t /= p;
      }
      f[k] = 1;
      if (pp_irreducible(f, p)) {
        modulus_ = f;
        break;
      }
    }
  }
  build_tables();
}

void FieldCtx::build_tables() {
  add_.assign(size_t(q_) * q_, 0);
  mul_.assign(size_t(q_) * q_, 0);
  neg_.assign(q_, 0);
  inv_.assign(q_, 0);

  auto to_digits = [&](uint32_t a) {
    std::vector<uint32_t> d(k_);
    for (uint32_t i = 0; i < k_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  };
  auto from = [&](const PP& f) {
    uint32_t v = 0, m = 1;
    for (uint32_t i = 0; i < k_ && i < f.size(); ++i) {
      v += f[i] * m;
      m *= p_;
    }
    return uint16_t(v);
  };

  for (uint32_t a = 0; a < q_; ++a) {
    auto da = to_digits(a);
    PP na(k_);
    for (uint32_t i = 0; i < k_; ++i) na[i] = (p_ - da[i]) % p_;
    neg_[a] = from(na);
    for (uint32_t b = 0; b < q_; ++b) {
      auto db = to_digits(b);
      PP s(k_);
      for (uint32_t i = 0; i < k_; ++i) s[i] = (da[i] + db[i]) % p_;
      add_[size_t(a) * q_ + b] = from(s);
      PP prod = pp_mod(pp_mul(pp_trim(PP(da.begin(), da.end())), pp_trim(PP(db.begin(), db.end())), p_),
                       modulus_, p_);
      mul_[size_t(a) * q_ + b] = from(prod);
    }
  }
  for (uint32_t a = 1; a < q_; ++a) {
    for (uint32_t b = 1; b < q_; ++b)
      if (mul(uint16_t(a), uint16_t(b)) == 1) {
        inv_[a] = uint16_t(b);
        break;
      }
    if (inv_[a] == 0) throw Error(Err::ReducibleModulus, "element without inverse");
  }
  for (uint32_t a = 1; a < q_; ++a) {
    uint32_t ord = 1;
    uint16_t x = uint16_t(a);
    while (x != 1) {
      x = mul(x, uint16_t(a));
      ++ord;
    }
    if (ord == q_ - 1) {
      primitive_ = uint16_t(a);
      break;
    }
  }
  if (q_ == 2) primitive_ = 1;
}

uint16_t FieldCtx::inv(uint16_t a) const {
  if (a == 0) throw Error(Err::DivisionByZero, "inverse of zero");
  return inv_[a];
}

uint16_t FieldCtx::pow(uint16_t a, uint64_t e) const {
  uint16_t r = 1, b = a;
  while (e) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
    e >>= 1;
  }
  return r;
}

uint16_t FieldCtx::from_int(int64_t v) const {
  int64_t m = v % int64_t(p_);
  if (m < 0) m += p_;
  return uint16_t(m);
}

uint16_t FieldCtx::from_digits(const std::vector<uint32_t>& digits) const {
  if (digits.size() > k_) throw Error(Err::ParseError, "too many digits for field element");
  uint32_t v = 0, m = 1;
  for (uint32_t i = 0; i < k_; ++i) {
    uint32_t d = i < digits.size() ? digits[i] : 0;
    if (d >= p_) throw Error(Err::ParseError, "digit out of range");
    v += d * m;
    m *= p_;
  }
  return uint16_t(v);
}

std::vector<uint32_t> FieldCtx::digits(uint16_t a) const {
  std::vector<uint32_t> d(k_);
  uint32_t v = a;
  for (uint32_t i = 0; i < k_; ++i) {
    d[i] = v % p_;
    v /= p_;
  }
  return d;
}

std::vector<uint16_t> FieldCtx::all_elements() const {
  std::vector<uint16_t> r(q_);
  for (uint32_t i = 0; i < q_; ++i) r[i] = uint16_t(i);
  return r;
}

std::string FieldCtx::elem_text(uint16_t a) const {
  if (k_ == 1) return std::to_string(a);
  std::ostringstream os;
  os << '[';
  auto d = digits(a);
  for (uint32_t i = 0; i < k_; ++i) {
    if (i) os << ',';
    os << d[i];
  }
  os << ']';
  return os.str();
}

std::string FieldCtx::key() const {
  std::ostringstream os;
  os << p_ << '^' << k_ << '/';
  for (auto c : modulus_) os << c << '.';
  return os.str();
}

std::pair<FieldCtx, Embedding> extension_field(const FieldCtx& K, uint32_t d) {
  if (d < 1) throw Error(Err::Usage, "extension degree must be >= 1");
  FieldCtx E(K.p(), K.k() * d, std::nullopt, FieldCtx::kHardMaxOrder);
  // root of K's defining polynomial inside E, smallest by index
  uint16_t root = 0;
  bool found = false;
  for (uint32_t h = 0; h < E.order(); ++h) {
    uint16_t acc = 0, hp = 1;
    for (uint32_t i = 0; i < K.modulus().size(); ++i) {
      acc = E.add(acc, E.mul(uint16_t(K.modulus()[i] % K.p()), hp));
      hp = E.mul(hp, uint16_t(h));
    }
    if (acc == 0) {
      root = uint16_t(h);
      found = true;
      break;
    }
  }
  if (!found) throw Error(Err::InternalInconsistency, "modulus has no root in extension");
  Embedding emb;
  emb.map.resize(K.order());
  for (uint32_t a = 0; a < K.order(); ++a) {
    auto dg = K.digits(uint16_t(a));
    uint16_t acc = 0, hp = 1;
    for (uint32_t i = 0; i < dg.size(); ++i) {
      acc = E.add(acc, E.mul(uint16_t(dg[i]), hp));
      hp = E.mul(hp, root);
    }
    emb.map[a] = acc;
  }
  return {std::move(E), std::move(emb)};
}

}  // namespace traceprod
