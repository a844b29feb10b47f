#include <doctest.h>

#include <set>

#include "traceprod/field.hpp"

using namespace traceprod;

namespace {

// independent irreducibility check over GF(p): a monic quadratic or cubic
// is irreducible iff it has no root
bool rootless(const std::vector<uint32_t>& coeffs, uint32_t p) {
  for (uint32_t x = 0; x < p; ++x) {
    uint64_t acc = 0, xp = 1;
    for (auto c : coeffs) {
      acc = (acc + c * xp) % p;
      xp = (xp * x) % p;
    }
    if (acc == 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("prime field basics") {
  FieldCtx F(3, 1);
  CHECK(F.order() == 3);
  CHECK(F.mul(2, 2) == 1);  // 4 mod 3
  CHECK(F.add(2, 2) == 1);
  CHECK(F.neg(1) == 2);
  CHECK(F.all_elements() == std::vector<uint16_t>{0, 1, 2});
}

TEST_CASE("default modulus for GF(4) is the unique rootless quadratic") {
  // oracle: enumerate the 4 monic quadratics over GF(2), keep rootless ones
  std::vector<std::vector<uint32_t>> rootless_quadratics;
  for (uint32_t c0 = 0; c0 < 2; ++c0)
    for (uint32_t c1 = 0; c1 < 2; ++c1)
      if (rootless({c0, c1, 1}, 2)) rootless_quadratics.push_back({c0, c1, 1});
  REQUIRE(rootless_quadratics.size() == 1);
  CHECK(rootless_quadratics[0] == std::vector<uint32_t>{1, 1, 1});  // x^2+x+1

  FieldCtx F(2, 2);
  CHECK(F.order() == 4);
  CHECK(F.modulus() == std::vector<uint32_t>{1, 1, 1});
}

TEST_CASE("GF(4) generator arithmetic") {
  FieldCtx F(2, 2);
  uint16_t g = F.from_digits({0, 1});
  uint16_t g_plus_1 = F.from_digits({1, 1});
  CHECK(F.mul(g, g) == g_plus_1);  // x^2 = x+1 mod x^2+x+1
}

TEST_CASE("inverses") {
  FieldCtx F(5, 1);
  CHECK(F.inv(2) == 3);
  CHECK_THROWS_AS(F.inv(0), Error);
}

TEST_CASE("non-prime characteristic rejected") {
  CHECK_THROWS_AS(FieldCtx(4, 1), Error);
  try {
    FieldCtx F(4, 1);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::NotPrime);
  }
}

TEST_CASE("size bound") {
  CHECK_THROWS_AS(FieldCtx(2, 7), Error);              // 128 > default 64
  CHECK_NOTHROW(FieldCtx(2, 7, std::nullopt, 128));    // raised bound
  CHECK_THROWS_AS(FieldCtx(2, 11, std::nullopt, 4096), Error);  // hard cap
}

TEST_CASE("field axioms exhaustively for small fields") {
  for (auto [p, k] : {std::pair<uint32_t, uint32_t>{2, 1}, {3, 1}, {2, 2}, {5, 1}, {3, 2}}) {
    FieldCtx F(p, k);
    uint32_t q = F.order();
    for (uint32_t a = 0; a < q; ++a) {
      CHECK(F.pow(uint16_t(a), q) == a);  // Frobenius fixed point: a^q = a
      for (uint32_t b = 0; b < q; ++b) {
        CHECK(F.add(a, b) == F.add(b, a));
        CHECK(F.mul(a, b) == F.mul(b, a));
        if (a && b) {
          uint16_t ab = F.mul(a, b);
          CHECK(F.inv(ab) == F.mul(F.inv(b), F.inv(a)));
        }
        for (uint32_t c = 0; c < q; ++c) {
          CHECK(F.add(F.add(a, b), c) == F.add(a, F.add(b, c)));
          CHECK(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
          CHECK(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("mixed-field arithmetic is rejected") {
  FieldCtx F3(3, 1), F5(5, 1);
  FieldElement a(F3, 2), b(F5, 2);
  CHECK_THROWS_AS(a + b, Error);
  FieldCtx F3b(3, 1);
  FieldElement c(F3b, 2);
  CHECK((a + c).value() == 1);  // structurally equal contexts interoperate
}

TEST_CASE("extension embeddings are field homomorphisms") {
  SUBCASE("GF(2) -> GF(4)") {
    FieldCtx K(2, 1);
    auto [E, emb] = extension_field(K, 2);
    CHECK(E.order() == 4);
    CHECK(emb(1) == 1);
  }
  SUBCASE("GF(3) -> GF(9)") {
    FieldCtx K(3, 1);
    auto [E, emb] = extension_field(K, 2);
    CHECK(E.order() == 9);
    CHECK(E.mul(emb(2), emb(2)) == emb(K.mul(2, 2)));
  }
  SUBCASE("GF(2) -> GF(8) default modulus") {
    FieldCtx K(2, 1);
    auto [E, emb] = extension_field(K, 3);
    CHECK(E.modulus() == std::vector<uint32_t>{1, 1, 0, 1});  // x^3+x+1, smallest rootless cubic
    CHECK(rootless(E.modulus(), 2));
  }
  SUBCASE("image of GF(3) in GF(9) is the fixed field of Frobenius") {
    FieldCtx K(3, 1);
    auto [E, emb] = extension_field(K, 2);
    std::set<uint16_t> image(emb.map.begin(), emb.map.end());
    for (uint32_t y = 0; y < E.order(); ++y) {
      bool fixed = (E.pow(uint16_t(y), K.order()) == y);
      CHECK(fixed == (image.count(uint16_t(y)) > 0));
    }
  }
  SUBCASE("GF(4) -> GF(16) multiplicative and injective on all of K") {
    FieldCtx K(2, 2);
    auto [E, emb] = extension_field(K, 2);
    for (uint32_t a = 0; a < K.order(); ++a) {
      for (uint32_t b = 0; b < K.order(); ++b) {
        CHECK(emb(K.mul(a, b)) == E.mul(emb(a), emb(b)));
        CHECK(emb(K.add(a, b)) == E.add(emb(a), emb(b)));
        if (a != b) CHECK(emb(a) != emb(b));
      }
    }
  }
}

TEST_CASE("element text form") {
  FieldCtx F3(3, 1);
  CHECK(F3.elem_text(2) == "2");
  FieldCtx F4(2, 2);
  CHECK(F4.elem_text(F4.from_digits({1, 1})) == "[1,1]");
}
