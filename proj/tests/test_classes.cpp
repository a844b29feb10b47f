#include <doctest.h>

#include <map>
#include <set>

#include "traceprod/classes.hpp"

using namespace traceprod;

namespace {

// test oracle: partition a full matrix set into conjugation orbits
int brute_class_count(const FieldCtx& F, int n, bool det_one_conjugators,
                      bool (*keep)(const Matrix&)) {
  uint64_t total = 1;
  for (int i = 0; i < n * n; ++i) total *= F.order();
  std::vector<Matrix> all;
  for (uint64_t idx = 0; idx < total; ++idx) {
    Matrix A(F, n, n);
    uint64_t t = idx;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        A.set(i, j, uint16_t(t % F.order()));
        t /= F.order();
      }
    if (keep(A)) all.push_back(A);
  }
  std::vector<Matrix> conjs;
  for (uint64_t idx = 0; idx < total; ++idx) {
    Matrix X(F, n, n);
    uint64_t t = idx;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        X.set(i, j, uint16_t(t % F.order()));
        t /= F.order();
      }
    if (!X.det()) continue;
    if (det_one_conjugators && X.det() != 1) continue;
    conjs.push_back(X);
  }
  std::set<std::string> seen;
  int classes = 0;
  for (auto& A : all) {
    if (seen.count(A.encode())) continue;
    ++classes;
    for (auto& X : conjs) seen.insert(conjugate(A, X).encode());
  }
  return classes;
}

}  // namespace

TEST_CASE("class derived data") {
  FieldCtx F(3, 1);
  auto cls = std::get<SimilarityClass>(parse_class_text(F, "x-1,(x-1)^2", Group::GL_similarity));
  CHECK(cls.n() == 3);
  CHECK(cls.det() == 1);
  CHECK(cls.trace() == 0);  // 1+1+1 = 0 mod 3
  CHECK(!cls.scalar());
  CHECK(!cls.cyclic());
  CHECK(cls.primary());
  Matrix R = cls.representative();
  CHECK(R == Matrix::direct_sum({Matrix::identity(F, 1),
                                 Matrix::companion(Poly::from_ints(F, {-1, 1}).pow(2))}));
  CHECK(class_of(R) == cls);
}

TEST_CASE("predicates") {
  FieldCtx F(3, 1);
  auto scalar = std::get<SimilarityClass>(parse_class_text(F, "x-2,x-2", Group::GL_similarity));
  CHECK(scalar.scalar());
  auto irred = std::get<SimilarityClass>(parse_class_text(F, "x^2+1", Group::GL_similarity));
  CHECK(irred.irreducible());
  CHECK(irred.primary());
  CHECK(irred.cyclic());
  auto unip = std::get<SimilarityClass>(parse_class_text(F, "(x-1)^2", Group::GL_similarity));
  CHECK(unip.primary());
  CHECK(!unip.irreducible());
  auto split = std::get<SimilarityClass>(parse_class_text(F, "x(x-1)", Group::M_similarity));
  CHECK(!split.primary());
  CHECK(split.rational_eigenvalues() == std::vector<uint16_t>{0, 1});
}

TEST_CASE("class enumeration counts") {
  SUBCASE("n = 1 gives q classes") {
    FieldCtx F(5, 1);
    CHECK(enumerate_classes(1, F, Group::M_similarity).size() == 5);
    CHECK(enumerate_classes(1, F, Group::GL_similarity).size() == 4);
  }
  SUBCASE("M(2,GF(2)) against brute-force partition") {
    FieldCtx F(2, 1);
    auto classes = enumerate_classes(2, F, Group::M_similarity);
    int brute = brute_class_count(F, 2, false, [](const Matrix&) { return true; });
    CHECK(brute == 6);
    CHECK(int(classes.size()) == brute);
  }
  SUBCASE("M(2,GF(3)) against brute-force partition") {
    FieldCtx F(3, 1);
    auto classes = enumerate_classes(2, F, Group::M_similarity);
    int brute = brute_class_count(F, 2, false, [](const Matrix&) { return true; });
    CHECK(int(classes.size()) == brute);
  }
  SUBCASE("GL(2,GF(3)) excludes singular chains") {
    FieldCtx F(3, 1);
    auto classes = enumerate_classes(2, F, Group::GL_similarity);
    int brute = brute_class_count(F, 2, false, [](const Matrix& A) { return A.det() != 0; });
    CHECK(int(classes.size()) == brute);
  }
  SUBCASE("SL(2,3) against brute-force orbit partition") {
    FieldCtx F(3, 1);
    auto classes = enumerate_classes(2, F, Group::SL);
    int brute = brute_class_count(F, 2, true, [](const Matrix& A) { return A.det() == 1; });
    CHECK(brute == 7);
    CHECK(int(classes.size()) == brute);
  }
  SUBCASE("SL(2,2) and SL(3,2) orbit partitions") {
    FieldCtx F(2, 1);
    CHECK(int(enumerate_classes(2, F, Group::SL).size()) ==
          brute_class_count(F, 2, true, [](const Matrix& A) { return A.det() == 1; }));
    CHECK(int(enumerate_classes(3, F, Group::SL).size()) ==
          brute_class_count(F, 3, true, [](const Matrix& A) { return A.det() == 1; }));
  }
}

TEST_CASE("SL splitting") {
  SUBCASE("transvection class of SL(2,3) splits in two") {
    FieldCtx F(3, 1);
    auto cls = class_of(Matrix::from_ints(F, {{1, 1}, {0, 1}}), Group::SL);
    auto& slc = std::get<SLClass>(cls);
    CHECK(slc.split_count() == 2);
    auto split = sl_split(slc.closure());
    REQUIRE(split.size() == 2);
    CHECK(split[0].label() == 1);
    CHECK(split[1].label() == 2);
    CHECK(std::get<SLClass>(class_of(split[0].representative(), Group::SL)) == split[0]);
    CHECK(std::get<SLClass>(class_of(split[1].representative(), Group::SL)) == split[1]);
  }
  SUBCASE("no splitting over GF(2)") {
    FieldCtx F(2, 1);
    Matrix C = Matrix::companion(Poly::from_ints(F, {1, 1, 0, 1}));
    auto slc = std::get<SLClass>(class_of(C, Group::SL));
    CHECK(slc.split_count() == 1);
    CHECK(slc.is_similarity_class());
  }
  SUBCASE("regular unipotent over GF(4) splits in three") {
    FieldCtx F(2, 2);
    auto closure = std::get<SimilarityClass>(
        parse_class_text(F, "(x-1)^3", Group::GL_similarity));
    auto split = sl_split(closure);
    CHECK(split.size() == 3);
    // conjugating the base by diag(l,1,...,1) realizes label l
    for (auto& s : split) {
      Matrix rep = s.representative();
      CHECK(std::get<SLClass>(class_of(rep, Group::SL)) == s);
    }
  }
  SUBCASE("scalar classes never split") {
    FieldCtx F(3, 1);
    auto closure = std::get<SimilarityClass>(parse_class_text(F, "x-1,x-1", Group::GL_similarity));
    CHECK(sl_split(closure).size() == 1);
  }
  SUBCASE("split count sums to the SL class count") {
    FieldCtx F(3, 1);
    auto gl = enumerate_classes(2, F, Group::GL_similarity);
    int total = 0;
    for (auto& c : gl) {
      auto& sc = std::get<SimilarityClass>(c);
      if (sc.det() == 1) total += int(sl_split(sc).size());
    }
    CHECK(total == int(enumerate_classes(2, F, Group::SL).size()));
  }
}

TEST_CASE("round trip representative/class_of over enumerations") {
  {
    FieldCtx F(2, 1);
    for (auto& c : enumerate_classes(3, F, Group::M_similarity))
      CHECK(class_of(representative(c)) == std::get<SimilarityClass>(c));
    for (auto& c : enumerate_classes(3, F, Group::SL))
      CHECK(std::get<SLClass>(class_of(representative(c), Group::SL)) == std::get<SLClass>(c));
  }
  {
    FieldCtx F(3, 1);
    for (auto& c : enumerate_classes(2, F, Group::M_similarity))
      CHECK(class_of(representative(c)) == std::get<SimilarityClass>(c));
    for (auto& c : enumerate_classes(2, F, Group::SL))
      CHECK(std::get<SLClass>(class_of(representative(c), Group::SL)) == std::get<SLClass>(c));
  }
  {
    FieldCtx F(2, 2);
    for (auto& c : enumerate_classes(2, F, Group::SL))
      CHECK(std::get<SLClass>(class_of(representative(c), Group::SL)) == std::get<SLClass>(c));
  }
}

TEST_CASE("minimal rank") {
  FieldCtx F(3, 1);
  SUBCASE("scalar") { CHECK(minimal_rank(Matrix::scalar(F, 3, 2)) == 0); }
  SUBCASE("companion of an irreducible") {
    for (uint32_t q : {2u, 3u}) {
      FieldCtx Fq(q, 1);
      for (int d : {2, 3}) {
        Poly f = monic_irreducibles(Fq, d)[0];
        CHECK(minimal_rank(Matrix::companion(f)) == d - 1);
      }
    }
  }
  SUBCASE("J2 + J2") {
    Matrix J = Matrix::from_ints(F, {{1, 1}, {0, 1}});
    Matrix A = Matrix::direct_sum({J, J});
    CHECK((A - Matrix::identity(F, 4)).rank() == 2);  // direct oracle
    CHECK(minimal_rank(A) == 2);
  }
}

TEST_CASE("class text round trip") {
  FieldCtx F(3, 1);
  for (auto& c : enumerate_classes(3, F, Group::M_similarity)) {
    auto& sc = std::get<SimilarityClass>(c);
    CHECK(std::get<SimilarityClass>(parse_class_text(F, sc.text(), Group::M_similarity)) == sc);
  }
  for (auto& c : enumerate_classes(2, F, Group::SL)) {
    auto& slc = std::get<SLClass>(c);
    CHECK(std::get<SLClass>(parse_class_text(F, slc.text(), Group::SL)) == slc);
  }
  SUBCASE("parser accepts caret powers and products") {
    auto a = parse_class_text(F, "x-1,(x-1)^2", Group::GL_similarity);
    auto b = parse_class_text(F, "x+2,x^2+x+1", Group::GL_similarity);
    CHECK(std::get<SimilarityClass>(a) == std::get<SimilarityClass>(b));
    auto c = parse_class_text(F, "(x-1)(x-2)", Group::GL_similarity);
    CHECK(std::get<SimilarityClass>(c).minimal_poly() == Poly::from_ints(F, {2, 0, 1}));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(parse_class_text(F, "x-1,x-2,x-1", Group::SL), Error);       // det != 1
    CHECK_THROWS_AS(parse_class_text(F, "2x-1", Group::GL_similarity), Error);   // not monic
    CHECK_THROWS_AS(parse_class_text(F, "x-1,x^2", Group::GL_similarity), Error);  // no chain
  }
}

TEST_CASE("extension field class text uses bracket tuples") {
  FieldCtx F(2, 2);
  for (auto& c : enumerate_classes(2, F, Group::SL)) {
    auto& slc = std::get<SLClass>(c);
    CHECK(std::get<SLClass>(parse_class_text(F, slc.text(), Group::SL)) == slc);
  }
}
