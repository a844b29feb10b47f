#pragma once

#include <optional>
#include <vector>

#include "traceprod/matrix.hpp"

namespace traceprod {

/// Monic chain f_1 | f_2 | ... | f_s with sum of degrees = n; the last
/// entry is the minimal polynomial and the product is the characteristic
/// polynomial. s = 1 exactly for cyclic (nonderogatory) matrices.
struct InvariantFactors {
  std::vector<Poly> chain;

  const Poly& minimal() const { return chain.back(); }
  Poly characteristic() const;
  int total_degree() const;
  bool operator==(const InvariantFactors& o) const { return chain == o.chain; }
};

/// Smith-style reduction of xI - A over K[x].
InvariantFactors invariant_factors(const Matrix& A);

bool is_similar(const Matrix& A, const Matrix& B);

/// X^{-1} A X; trace and invariant factors are preserved.
Matrix conjugate(const Matrix& A, const Matrix& X);

/// Row vector v with v, vA, ..., vA^{n-1} independent; nullopt iff the
/// matrix is not cyclic.
std::optional<std::vector<uint16_t>> cyclic_vector(const Matrix& A);

/// Reduced row echelon form in place; returns pivot column list.
std::vector<int> rref(std::vector<std::vector<uint16_t>>& rows, const FieldCtx& F);

/// Basis of {x : x M = 0-style system} for the linear system given as
/// equation rows (each row = coefficients over the unknowns).
std::vector<std::vector<uint16_t>> nullspace(std::vector<std::vector<uint16_t>> eqs,
                                             int unknowns, const FieldCtx& F);

/// One solution of eqs * x^T = rhs, plus nullspace access via nullspace().
std::optional<std::vector<uint16_t>> solve_linear(std::vector<std::vector<uint16_t>> eqs,
                                                  std::vector<uint16_t> rhs, const FieldCtx& F);

/// K-basis of {X : AX = XA}, canonical (from RREF of the commutation system).
std::vector<Matrix> centralizer_basis(const Matrix& A);

struct DetImage {
  std::vector<uint16_t> members;  // sorted subgroup of K*
  bool certified = true;          // false when sampled rather than enumerated

  bool full(const FieldCtx& F) const { return members.size() == F.order() - 1; }
  bool contains(uint16_t v) const;
};

/// {det X : X in GL(n,K), XA = AX}, a subgroup of K*. Enumerated exactly
/// while the centralizer algebra fits within `budget` elements, otherwise
/// sampled to closure (marked non-certified).
DetImage centralizer_det_image(const Matrix& A, uint64_t budget = uint64_t(1) << 24,
                               uint64_t seed = kDefaultSeed);

/// Some invertible X with X^{-1} A X = B; requires A ~ B.
Matrix find_conjugator(const Matrix& A, const Matrix& B, uint64_t seed = kDefaultSeed);

/// Subgroup of the cyclic group K* generated by `gens`.
std::vector<uint16_t> subgroup_closure(const FieldCtx& F, std::vector<uint16_t> gens);

}  // namespace traceprod
