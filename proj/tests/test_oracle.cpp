#include <doctest.h>

#include <set>

#include "traceprod/json_io.hpp"
#include "traceprod/oracle.hpp"

using namespace traceprod;

namespace {

SimilarityClass sim(const FieldCtx& F, const std::string& text) {
  return std::get<SimilarityClass>(parse_class_text(F, text, Group::GL_similarity));
}

// independent orbit oracle: full sweep over the conjugating group
size_t brute_orbit_size(const Matrix& A, bool det_one) {
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  uint64_t total = 1;
  for (int i = 0; i < n * n; ++i) total *= F.order();
  std::set<std::string> orbit;
  for (uint64_t idx = 0; idx < total; ++idx) {
    Matrix X(F, n, n);
    uint64_t t = idx;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        X.set(i, j, uint16_t(t % F.order()));
        t /= F.order();
      }
    uint16_t d = X.det();
    if (!d || (det_one && d != 1)) continue;
    orbit.insert(conjugate(A, X).encode());
  }
  return orbit.size();
}

size_t stream_size(OrbitStream& s) {
  size_t i = 0;
  while (s.at(i)) ++i;
  return i;
}

}  // namespace

TEST_CASE("orbits") {
  SUBCASE("scalar orbits are singletons") {
    FieldCtx F(3, 1);
    OrbitStream s(Matrix::scalar(F, 2, 2), Group::GL_similarity);
    CHECK(stream_size(s) == 1);
  }
  SUBCASE("transvection orbits under SL(2,3) and GL(2,3)") {
    FieldCtx F(3, 1);
    Matrix T = Matrix::from_ints(F, {{1, 1}, {0, 1}});
    // SL centralizer is {+-(I + tN)} of order 6, so the orbit is 24/6 = 4
    CHECK(brute_orbit_size(T, true) == 4);
    OrbitStream s(T, Group::SL);
    CHECK(stream_size(s) == 4);
    // under GL it merges with the other SL class
    OrbitStream g(T, Group::GL_similarity);
    CHECK(stream_size(g) == brute_orbit_size(T, false));
    CHECK(stream_size(g) == 8);
  }
  SUBCASE("companion(x^3+x+1) under GL(3,2): size 24 = 168/7") {
    FieldCtx F(2, 1);
    Matrix C = Matrix::companion(Poly::from_ints(F, {1, 1, 0, 1}));
    OrbitStream s(C, Group::GL_similarity);
    CHECK(stream_size(s) == 24);
    // cross-check: |orbit| * |centralizer in GL| = |GL(3,2)| = 168
    uint64_t cent = 0, total = 1;
    for (int i = 0; i < 9; ++i) total *= 2;
    for (uint64_t idx = 0; idx < total; ++idx) {
      Matrix X(F, 3, 3);
      uint64_t t = idx;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          X.set(i, j, uint16_t(t % 2));
          t /= 2;
        }
      if (X.det() && X * C == C * X) ++cent;
    }
    CHECK(cent == 7);
    CHECK(stream_size(s) * cent == 168);
  }
  SUBCASE("budget is enforced") {
    FieldCtx F(3, 1);
    Matrix T = Matrix::from_ints(F, {{1, 1}, {0, 1}});
    OrbitStream s(T, Group::GL_similarity, 3);
    CHECK_THROWS_AS(stream_size(s), Error);
  }
}

TEST_CASE("trace sets") {
  FieldCtx F(3, 1);
  SUBCASE("scalar psi gives a singleton") {
    auto om = sim(F, "x^2+1");
    auto ps = sim(F, "x-2,x-2");
    auto ts = trace_set(AnyClass(om), AnyClass(ps), false);
    CHECK(ts.members.size() == 1);
    // tr(w * 2I) = 2 tr(w) = 2 * 0 = 0
    CHECK(ts.members[0] == 0);
    CHECK(!ts.complete);
  }
  SUBCASE("the GL(2,3) fixture: tr(Omega Psi) = GF(3)") {
    auto om = sim(F, "x^2+1");
    auto ps = sim(F, "x^2+x-1");
    auto ts = trace_set(AnyClass(om), AnyClass(ps), false);
    CHECK(ts.complete);
    auto ts2 = trace_set(AnyClass(om), AnyClass(om), false);
    CHECK(ts2.complete);  // tr(Omega^2) = GF(3) as well
  }
  SUBCASE("unipotent against irreducible: the excluded trace shows up") {
    auto om = sim(F, "(x-1)^2");
    auto ps = sim(F, "x^2+1");
    auto ts = trace_set(AnyClass(om), AnyClass(ps), false);
    CHECK(!ts.complete);
    CHECK(ts.members == std::vector<uint16_t>{1, 2});
  }
  SUBCASE("fixed-representative method equals full double enumeration, n = 2") {
    for (uint32_t q : {2u, 3u}) {
      FieldCtx Fq(q, 1);
      uint64_t total = 1;
      for (int i = 0; i < 4; ++i) total *= q;
      auto classes = enumerate_classes(2, Fq, Group::M_similarity);
      for (auto& a : classes)
        for (auto& b : classes) {
          // brute: sweep every member of both classes
          std::set<uint16_t> brute;
          std::vector<Matrix> in_a, in_b;
          for (uint64_t idx = 0; idx < total; ++idx) {
            Matrix A(Fq, 2, 2);
            uint64_t t = idx;
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) {
                A.set(i, j, uint16_t(t % q));
                t /= q;
              }
            if (class_of(A) == std::get<SimilarityClass>(a)) in_a.push_back(A);
            if (class_of(A) == std::get<SimilarityClass>(b)) in_b.push_back(A);
          }
          for (auto& x : in_a)
            for (auto& y : in_b) brute.insert((x * y).trace());
          auto ts = trace_set(a, b, false);
          CHECK(std::set<uint16_t>(ts.members.begin(), ts.members.end()) == brute);
        }
    }
  }
  SUBCASE("early-exit agrees with the full sweep when the set is complete") {
    for (uint32_t q : {2u, 3u}) {
      FieldCtx Fq(q, 1);
      auto classes = enumerate_classes(2, Fq, Group::M_similarity);
      for (auto& a : classes) {
        if (std::get<SimilarityClass>(a).scalar()) continue;
        for (auto& b : classes) {
          if (std::get<SimilarityClass>(b).scalar()) continue;
          auto full = trace_set(a, b, false);
          auto fast = trace_set(a, b, true);
          CHECK(full.complete == fast.complete);
          if (full.complete) CHECK(fast.members == full.members);
          if (!full.complete) CHECK(fast.members == full.members);
        }
      }
    }
  }
}

TEST_CASE("class product decompositions reproduce the GL(2,3) table") {
  FieldCtx F(3, 1);
  auto om = AnyClass(sim(F, "x^2+1"));
  auto ps = AnyClass(sim(F, "x^2+x-1"));

  auto texts = [](const std::vector<AnyClass>& v) {
    std::set<std::string> out;
    for (auto& c : v) out.insert(class_text(c));
    return out;
  };

  SUBCASE("Omega^2 = Omega + I + (-I)") {
    auto d = class_product_decomposition(om, om);
    CHECK(texts(d) == std::set<std::string>{"x^2+1", "x+2,x+2", "x+1,x+1"});
  }
  SUBCASE("Psi^2 = Omega + (-I) + U2") {
    auto d = class_product_decomposition(ps, ps);
    CHECK(texts(d) == std::set<std::string>{"x^2+1", "x+1,x+1", "x^2+x+1"});
  }
  SUBCASE("Omega Psi = -Psi + Psi + diag(1,-1)") {
    auto d = class_product_decomposition(om, ps);
    CHECK(texts(d) == std::set<std::string>{"x^2+x+2", "x^2+2*x+2", "x^2+2"});
  }
  SUBCASE("identity psi returns omega alone") {
    auto one = AnyClass(sim(F, "x-1,x-1"));
    auto d = class_product_decomposition(om, one);
    CHECK(texts(d) == std::set<std::string>{"x^2+1"});
  }
}

TEST_CASE("theorem verification reports") {
  SUBCASE("M(3,2) exhaustive: full trace sets and witnesses") {
    FieldCtx F(2, 1);
    auto rep = verify_theorem(3, F, Group::M_similarity, VerifyMode::Exhaustive);
    CHECK(rep.ok);
    CHECK(rep.data["failures"].empty());
    CHECK(rep.data["exhaustive"] == true);
    CHECK(rep.data["pairs_checked"] == 12 * 12);
  }
  SUBCASE("SL(3,2) exhaustive") {
    FieldCtx F(2, 1);
    auto rep = verify_theorem(3, F, Group::SL, VerifyMode::Exhaustive);
    CHECK(rep.ok);
    CHECK(rep.data["failures"].empty());
  }
  SUBCASE("M(2,3) exhaustive records the dichotomy without failures") {
    FieldCtx F(3, 1);
    auto rep = verify_theorem(2, F, Group::M_similarity, VerifyMode::Exhaustive);
    CHECK(rep.ok);
    CHECK(rep.data["failures"].empty());
    CHECK(!rep.data["dichotomy"].empty());
  }
  SUBCASE("sampled mode is deterministic in the seed") {
    FieldCtx F(3, 1);
    auto r1 = verify_theorem(3, F, Group::M_similarity, VerifyMode::Sampled, 10, 77);
    auto r2 = verify_theorem(3, F, Group::M_similarity, VerifyMode::Sampled, 10, 77);
    CHECK(r1.data.dump() == r2.data.dump());
    CHECK(r1.ok);
  }
}

TEST_CASE("unproved-claim verification") {
  for (uint32_t q : {2u, 3u}) {
    FieldCtx F(q, 1);
    auto rep = verify_gl2_irreducible_claim(F);
    CHECK(rep.ok);
    CHECK(rep.data["oracle_only"] == true);
    CHECK(rep.data["failures"].empty());
  }
}

TEST_CASE("product-of-classes check on SL(3,2)") {
  FieldCtx F(2, 1);
  auto rep = product_class_check(3, F);
  CHECK(rep.ok);
  CHECK(rep.data["never_single_class"] == true);
  CHECK(rep.data["nontrivial_classes"] == 5);
  CHECK(rep.data["pairs_checked"] == 25);
}

TEST_CASE("products of non-central SL(2,3) classes never collapse to one class") {
  // SL(2,3) is the center lift of PSL(2,3); the check runs at the SL level
  // with the central classes +-I excluded
  FieldCtx F(3, 1);
  auto classes = enumerate_classes(2, F, Group::SL);
  std::vector<AnyClass> noncentral;
  for (auto& c : classes) {
    auto& slc = std::get<SLClass>(c);
    if (slc.closure().scalar()) continue;
    noncentral.push_back(c);
  }
  CHECK(noncentral.size() == 5);
  for (auto& a : noncentral)
    for (auto& b : noncentral) {
      auto d = class_product_decomposition(a, b);
      CHECK(d.size() >= 2);
    }
}

TEST_CASE("minimal rank: formula path equals the extension-field oracle") {
  SUBCASE("exhaustive n = 2 over GF(2) and GF(3)") {
    for (uint32_t q : {2u, 3u}) {
      FieldCtx F(q, 1);
      uint64_t total = 1;
      for (int i = 0; i < 4; ++i) total *= q;
      for (uint64_t idx = 0; idx < total; ++idx) {
        Matrix A(F, 2, 2);
        uint64_t t = idx;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            A.set(i, j, uint16_t(t % q));
            t /= q;
          }
        CHECK(minimal_rank(A) == minimal_rank_bruteforce(A));
      }
    }
  }
  SUBCASE("random n = 4, 5 samples") {
    SplitMix64 rng(2024);
    for (uint32_t q : {2u, 3u}) {
      FieldCtx F(q, 1);
      for (int n : {4, 5}) {
        for (int t = 0; t < 25; ++t) {
          Matrix A(F, n, n);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A.set(i, j, uint16_t(rng.below(q)));
          CHECK(minimal_rank(A) == minimal_rank_bruteforce(A));
        }
      }
    }
  }
}

TEST_CASE("json forms") {
  FieldCtx F(3, 1);
  Matrix M = Matrix::from_ints(F, {{1, 2}, {0, 1}});
  auto j = matrix_json(M);
  CHECK(j["n"] == 2);
  CHECK(j["field"]["p"] == 3);
  CHECK(j["rows"][0][1] == 2);
  FieldCtx F4(2, 2);
  auto je = elem_json(F4, F4.from_digits({1, 1}));
  CHECK(je.is_array());
  CHECK(je[0] == 1);
  CHECK(je[1] == 1);
}
