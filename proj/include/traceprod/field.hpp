#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace traceprod {

enum class Err {
  NotPrime,
  ReducibleModulus,
  FieldTooLarge,
  DivisionByZero,
  MixedFields,
  DimensionMismatch,
  Singular,
  NoLU,
  NotCyclic,
  DegenerateBasis,
  DetNotOne,
  ScalarClass,
  IrreducibleOmega,
  HypothesisViolated,
  PreconditionViolated,
  EmbedSearchFailed,
  MrTooSmall,
  SolveFailed,
  ConstructionFailed,
  InternalInconsistency,
  UnsupportedCase,
  BudgetExceeded,
  TooLarge,
  ParseError,
  Usage,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
  Error(Err kind, const std::string& msg)
      : std::runtime_error(std::string(err_name(kind)) + ": " + msg), kind_(kind) {}
  Err kind() const { return kind_; }

private:
  Err kind_;
};

/// Arithmetic context for GF(p^k). Immutable after construction; all
/// operations work on element indices 0..q-1, where index a has base-p
/// digits equal to the coefficients of the element on the power basis
/// 1, g, g^2, ... (g = class of x modulo the defining polynomial).
///
/// Index order doubles as the canonical element order used everywhere
/// (enumeration, coset representatives, JSON output).
class FieldCtx {
public:
  static constexpr uint32_t kDefaultMaxOrder = 64;
  static constexpr uint32_t kHardMaxOrder = 1024;

  /// modulus, when given, lists monic coefficients constant-first (length
  /// k+1). When omitted the smallest monic irreducible of degree k (by
  /// index of its coefficient tuple) is selected.
  FieldCtx(uint32_t p, uint32_t k,
           std::optional<std::vector<uint32_t>> modulus = std::nullopt,
           uint32_t max_order = kDefaultMaxOrder);

  uint32_t p() const { return p_; }
  uint32_t k() const { return k_; }
  uint32_t order() const { return q_; }
  const std::vector<uint32_t>& modulus() const { return modulus_; }

  bool same_field(const FieldCtx& o) const {
    return p_ == o.p_ && k_ == o.k_ && modulus_ == o.modulus_;
  }

  uint16_t add(uint16_t a, uint16_t b) const { return add_[size_t(a) * q_ + b]; }
  uint16_t sub(uint16_t a, uint16_t b) const { return add_[size_t(a) * q_ + neg_[b]]; }
  uint16_t mul(uint16_t a, uint16_t b) const { return mul_[size_t(a) * q_ + b]; }
  uint16_t neg(uint16_t a) const { return neg_[a]; }
  uint16_t inv(uint16_t a) const;
  uint16_t div(uint16_t a, uint16_t b) const { return mul(a, inv(b)); }
  uint16_t pow(uint16_t a, uint64_t e) const;
  const uint16_t* mul_row(uint16_t a) const { return mul_.data() + size_t(a) * q_; }

  uint16_t one() const { return 1; }
  /// Canonical image of an integer (reduces mod p into the prime subfield).
  uint16_t from_int(int64_t v) const;
  /// Element from base-p digit vector (low degree first, length <= k).
  uint16_t from_digits(const std::vector<uint32_t>& digits) const;
  std::vector<uint32_t> digits(uint16_t a) const;

  /// Multiplicative generator of K* (smallest by index).
  uint16_t primitive_element() const { return primitive_; }

  std::vector<uint16_t> all_elements() const;

  std::string elem_text(uint16_t a) const;
  std::string key() const;  // "p^k/modulus" identity string

private:
  uint32_t p_, k_, q_;
  std::vector<uint32_t> modulus_;
  std::vector<uint16_t> add_, mul_, neg_, inv_;
  uint16_t primitive_ = 0;

  void build_tables();
};

/// Value-type element with an owning context handle. Mixed-context
/// arithmetic is a hard error.
class FieldElement {
public:
  FieldElement() : ctx_(nullptr), v_(0) {}
  FieldElement(const FieldCtx& ctx, uint16_t v) : ctx_(&ctx), v_(v) {}

  uint16_t value() const { return v_; }
  const FieldCtx& ctx() const { return *ctx_; }
  bool is_zero() const { return v_ == 0; }

  FieldElement operator+(const FieldElement& o) const { return wrap(ctx_->add(v_, check(o))); }
  FieldElement operator-(const FieldElement& o) const { return wrap(ctx_->sub(v_, check(o))); }
  FieldElement operator*(const FieldElement& o) const { return wrap(ctx_->mul(v_, check(o))); }
  FieldElement operator/(const FieldElement& o) const { return wrap(ctx_->div(v_, check(o))); }
  FieldElement operator-() const { return wrap(ctx_->neg(v_)); }
  FieldElement inv() const { return wrap(ctx_->inv(v_)); }
  FieldElement pow(uint64_t e) const { return wrap(ctx_->pow(v_, e)); }

  bool operator==(const FieldElement& o) const { return v_ == o.v_ && ctx_->same_field(*o.ctx_); }

private:
  const FieldCtx* ctx_;
  uint16_t v_;

  FieldElement wrap(uint16_t v) const { return FieldElement(*ctx_, v); }
  uint16_t check(const FieldElement& o) const {
    if (!ctx_->same_field(*o.ctx_)) throw Error(Err::MixedFields, "elements from different fields");
    return o.v_;
  }
};

struct Embedding {
  std::vector<uint16_t> map;  // indexed by source element

  uint16_t operator()(uint16_t a) const { return map[a]; }
};

/// GF(p^k) -> GF(p^{kd}) with a homomorphic embedding; the image is the
/// fixed field of the d-th power of Frobenius.
std::pair<FieldCtx, Embedding> extension_field(const FieldCtx& K, uint32_t d);

/// Deterministic splittable PRNG used by every seeded search.
struct SplitMix64 {
  uint64_t s;
  explicit SplitMix64(uint64_t seed) : s(seed) {}
  uint64_t next() {
    uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  uint32_t below(uint32_t n) { return uint32_t(next() % n); }
};

constexpr uint64_t kDefaultSeed = 12345;

}  // namespace traceprod
