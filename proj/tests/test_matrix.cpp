#include <doctest.h>

#include "traceprod/linalg.hpp"
#include "traceprod/matrix.hpp"

using namespace traceprod;

TEST_CASE("basic arithmetic and invariants") {
  FieldCtx F(5, 1);
  Matrix I = Matrix::identity(F, 3);
  CHECK(I.trace() == 3);
  CHECK(I.det() == 1);

  FieldCtx F2(2, 1);
  Matrix S = Matrix::from_ints(F2, {{0, 1}, {1, 0}});
  CHECK(S.det() == 1);

  FieldCtx F3(3, 1);
  Matrix ones = Matrix::from_ints(F3, {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  CHECK(ones.rank() == 1);
}

TEST_CASE("inverse and conjugation") {
  FieldCtx F(3, 1);
  Matrix A = Matrix::from_ints(F, {{1, 2}, {0, 1}});
  Matrix Ainv = A.inverse();
  CHECK((A * Ainv).is_identity());

  Matrix D = Matrix::from_ints(F, {{1, 0}, {0, 2}});
  Matrix P = Matrix::from_ints(F, {{0, 1}, {1, 0}});
  CHECK(conjugate(D, P) == Matrix::from_ints(F, {{2, 0}, {0, 1}}));

  // trace is a similarity invariant
  SplitMix64 rng(7);
  FieldCtx F5(5, 1);
  for (int t = 0; t < 20; ++t) {
    Matrix M(F5, 3, 3), X(F5, 3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        M.set(i, j, uint16_t(rng.below(5)));
        X.set(i, j, uint16_t(rng.below(5)));
      }
    if (!X.det()) continue;
    CHECK(conjugate(M, X).trace() == M.trace());
  }
}

TEST_CASE("lu decomposition") {
  FieldCtx F2(2, 1);
  SUBCASE("identity") {
    auto lu = lu_decompose(Matrix::identity(F2, 3));
    REQUIRE(lu.has_value());
    CHECK(lu->first.is_identity());
    CHECK(lu->second.is_identity());
  }
  SUBCASE("vanishing leading minor") {
    CHECK(!lu_decompose(Matrix::from_ints(F2, {{0, 1}, {1, 0}})).has_value());
  }
  SUBCASE("2x2 over GF(2)") {
    Matrix D = Matrix::from_ints(F2, {{1, 1}, {1, 0}});
    auto lu = lu_decompose(D);
    REQUIRE(lu.has_value());
    CHECK(lu->first == Matrix::from_ints(F2, {{1, 0}, {1, 1}}));
    CHECK(lu->second == Matrix::from_ints(F2, {{1, 1}, {0, 1}}));
    CHECK(lu->first * lu->second == D);
  }
  SUBCASE("exists iff all leading principal minors are nonzero, exhaustively") {
    for (uint32_t q : {2u, 3u}) {
      FieldCtx F(q, 1);
      int n = 3;
      uint64_t total = 1;
      for (int i = 0; i < n * n; ++i) total *= q;
      for (uint64_t idx = 0; idx < total; ++idx) {
        Matrix A(F, n, n);
        uint64_t t = idx;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            A.set(i, j, uint16_t(t % q));
            t /= q;
          }
        bool minors_ok = true;
        for (int m = 1; m <= n; ++m)
          if (!A.submatrix(0, 0, m, m).det()) minors_ok = false;
        auto lu = lu_decompose(A);
        CHECK(lu.has_value() == minors_ok);
        if (lu) CHECK(lu->first * lu->second == A);
      }
    }
  }
}

TEST_CASE("charpoly and minpoly") {
  FieldCtx F(3, 1);
  SUBCASE("companion matrices") {
    for (auto f : monic_polys(F, 3)) {
      Matrix C = Matrix::companion(f);
      CHECK(charpoly(C) == f);
      CHECK(minpoly(C) == f);
    }
  }
  SUBCASE("scalar") {
    Matrix A = Matrix::scalar(F, 4, 2);
    CHECK(minpoly(A) == Poly::from_ints(F, {-2, 1}));
    CHECK(charpoly(A) == Poly::from_ints(F, {-2, 1}).pow(4));
  }
  SUBCASE("two Jordan blocks") {
    Matrix J = Matrix::from_ints(F, {{1, 1}, {0, 1}});
    Matrix A = Matrix::direct_sum({J, J});
    // oracle: (A-I) is nonzero with (A-I)^2 = 0, so minpoly is (x-1)^2
    Matrix N = A - Matrix::identity(F, 4);
    CHECK(!N.is_zero());
    CHECK((N * N).is_zero());
    CHECK(charpoly(A) == Poly::from_ints(F, {-1, 1}).pow(4));
    CHECK(minpoly(A) == Poly::from_ints(F, {-1, 1}).pow(2));
  }
  SUBCASE("minpoly annihilates") {
    SplitMix64 rng(3);
    FieldCtx F4(2, 2);
    for (int t = 0; t < 25; ++t) {
      Matrix A(F4, 3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A.set(i, j, uint16_t(rng.below(4)));
      Poly mp = minpoly(A);
      CHECK(eval_poly(mp, A).is_zero());
      CHECK(mp.divides(charpoly(A)));
    }
  }
}
