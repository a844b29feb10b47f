#pragma once

#include <optional>
#include <variant>

#include "traceprod/classes.hpp"

namespace traceprod {

/// A verified construction: W in Omega, Q in Psi (group sense), with
/// trace(W*Q) = tau. Builders never return unverified pairs.
struct WitnessPair {
  Matrix W, Q, product;
  uint16_t tau = 0;
  std::string path;                                    // which construction produced it
  std::vector<std::pair<std::string, Matrix>> steps;   // conjugator audit trail
};

struct TraceExcluded {
  uint16_t value;  // the one unreachable trace
};

using WitnessResult = std::variant<WitnessPair, TraceExcluded>;

struct TraceDichotomy {
  bool full = false;
  std::optional<uint16_t> excluded;  // present iff !full
};

/// 2x2 case. Omega must be nonscalar with reducible minimal polynomial;
/// Psi nonscalar. Returns TraceExcluded(alpha*tr Psi) exactly when Omega is
/// primary and Psi is irreducible and tau hits the excluded value.
WitnessResult witness_2x2(const SimilarityClass& omega, const SimilarityClass& psi, uint16_t tau);

TraceDichotomy trace_dichotomy_2x2(const SimilarityClass& omega, const SimilarityClass& psi);

struct Lemma22Result {
  Matrix W, Q, product;  // product == [[delta, z],[0, D]] exactly
  uint16_t delta = 0;
};

/// For cyclic classes of M(n,K) and an LU-admissible D in GL(n-1,K),
/// produce W in Omega, Q in Psi with W*Q = [[delta, z],[0, D]] where
/// delta = det(D)^{-1} det(Omega) det(Psi).
Lemma22Result lemma22_factor(const SimilarityClass& omega, const SimilarityClass& psi,
                             const Matrix& D);
std::optional<Lemma22Result> try_lemma22(const SimilarityClass& omega,
                                         const SimilarityClass& psi, const Matrix& D);

struct InterleaveForm {
  Matrix conjugator;  // X with conjugate(input, X) == form
  Matrix form;
  int m = 0;
  bool odd = false;
};

/// Normal form of a cyclic invertible matrix in an interleaved power basis:
/// [[0, I],[C, *]] for even size, [[0, 0, I],[0, b, *],[C, *, *]] for odd
/// size, with C cyclic and invertible.
InterleaveForm interleave_form(const Matrix& c);

/// Theorem-1 constructor for nonscalar similarity classes of M(n,K), n >= 3.
WitnessPair theorem1_witness(const SimilarityClass& omega, const SimilarityClass& psi,
                             uint16_t tau, uint64_t seed = kDefaultSeed);

/// Conjugator T with conjugate(M,T) carrying A as its exact top-left m x m
/// block; requires m <= minimal_rank(M) and 2m <= n, M invertible.
Matrix sourour_embed(const Matrix& M, const Matrix& A, uint64_t seed = kDefaultSeed);

WitnessPair sl_cyclic_even(const SLClass& omega, const SLClass& psi, uint16_t tau,
                           uint64_t seed = kDefaultSeed);
WitnessPair sl_cyclic_odd(const SLClass& omega, const SLClass& psi, uint16_t tau,
                          uint64_t seed = kDefaultSeed);
WitnessPair sl3_witness(const SLClass& omega, const SLClass& psi, uint16_t tau,
                        uint64_t seed = kDefaultSeed);
WitnessPair sl43_witness(const SLClass& omega, const SLClass& psi, uint16_t tau,
                         uint64_t seed = kDefaultSeed);
WitnessPair sl_general_witness(const SLClass& omega, const SLClass& psi, uint16_t tau,
                               uint64_t seed = kDefaultSeed);

/// Dispatcher. n >= 3 on either group always yields a verified pair; n = 2
/// under M/GL similarity is served by the 2x2 machinery and may legitimately
/// return TraceExcluded.
WitnessResult witness(const AnyClass& omega, const AnyClass& psi, uint16_t tau, Group group,
                      uint64_t seed = kDefaultSeed);

}  // namespace traceprod
