#include <doctest.h>

#include "traceprod/poly.hpp"

using namespace traceprod;

TEST_CASE("polynomial arithmetic") {
  FieldCtx F(3, 1);
  Poly a = Poly::from_ints(F, {1, 1});  // x+1
  Poly b = Poly::from_ints(F, {2, 1});  // x+2
  CHECK((a * b) == Poly::from_ints(F, {2, 0, 1}));  // x^2 + 3x + 2 = x^2+2
  auto [q, r] = (a * b).divmod(a);
  CHECK(q == b);
  CHECK(r.is_zero());
}

TEST_CASE("gcd and lcm") {
  FieldCtx F(2, 1);
  Poly x = Poly::x(F);
  Poly f = x * (x + Poly::constant(F, 1));
  CHECK(gcd(f, x) == x);
  CHECK(lcm(x, x + Poly::constant(F, 1)) == f);
}

TEST_CASE("irreducibility") {
  FieldCtx F(2, 1);
  CHECK(Poly::from_ints(F, {1, 1, 1}).is_irreducible());   // x^2+x+1
  CHECK(!Poly::from_ints(F, {1, 0, 1}).is_irreducible());  // x^2+1 = (x+1)^2
  CHECK(Poly::from_ints(F, {1, 1, 0, 1}).is_irreducible());  // x^3+x+1

  // counts: (q^2-q)/2 monic irreducible quadratics
  CHECK(monic_irreducibles(F, 2).size() == 1);
  FieldCtx F3(3, 1);
  CHECK(monic_irreducibles(F3, 2).size() == 3);
  CHECK(monic_irreducibles(F3, 3).size() == 8);
}

TEST_CASE("factorization recombines") {
  FieldCtx F(3, 1);
  Poly f = Poly::from_ints(F, {1, 0, 1}) * Poly::from_ints(F, {2, 1}).pow(2);  // (x^2+1)(x+2)^2
  auto fac = f.factor();
  Poly prod = Poly::constant(F, 1);
  int total = 0;
  for (auto& [p, e] : fac) {
    CHECK(p.is_irreducible());
    prod = prod * p.pow(e);
    total += p.degree() * e;
  }
  CHECK(prod == f.monic());
  CHECK(total == f.degree());
}

TEST_CASE("evaluation") {
  FieldCtx F(5, 1);
  Poly f = Poly::from_ints(F, {3, 0, 1});  // x^2+3
  CHECK(f.eval(1) == 4);
  CHECK(f.eval(2) == 2);
}

TEST_CASE("text form") {
  FieldCtx F(3, 1);
  CHECK(Poly::from_ints(F, {2, 1, 1}).to_text() == "x^2+x+2");
  CHECK(Poly::from_ints(F, {0, 2}).to_text() == "2*x");
  CHECK(Poly::zero(F).to_text() == "0");
  FieldCtx F4(2, 2);
  Poly g = Poly(F4, {F4.from_digits({1, 1}), 0, 1});
  CHECK(g.to_text() == "x^2+[1,1]");
}
