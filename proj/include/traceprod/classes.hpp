#pragma once

#include <string>
#include <variant>
#include <vector>

#include "traceprod/linalg.hpp"

namespace traceprod {

enum class Group { M_similarity, GL_similarity, SL };

const char* group_name(Group g);
Group group_from_name(const std::string& s);

/// A similarity class of M(n,K), identified by its invariant-factor chain.
class SimilarityClass {
public:
  SimilarityClass(const FieldCtx& F, InvariantFactors factors);

  const FieldCtx& ctx() const { return *f_; }
  int n() const { return n_; }
  const InvariantFactors& factors() const { return factors_; }
  const Poly& minimal_poly() const { return factors_.minimal(); }
  uint16_t det() const { return det_; }
  uint16_t trace() const { return trace_; }

  bool scalar() const { return minimal_poly().degree() == 1; }
  bool cyclic() const { return factors_.chain.size() == 1; }
  bool nonsingular() const { return det_ != 0; }
  /// minimal polynomial is a power of a single irreducible
  bool primary() const;
  /// n = 2 sense: minimal polynomial irreducible of degree 2
  bool irreducible() const;
  /// The eigenvalues in K (roots of the minimal polynomial).
  std::vector<uint16_t> rational_eigenvalues() const;
  /// (irreducible, exponent) elementary divisors across the whole chain.
  std::vector<std::pair<Poly, int>> elementary_divisors() const;

  /// Direct sum of companion blocks, chain order.
  Matrix representative() const;

  bool operator==(const SimilarityClass& o) const;
  bool operator!=(const SimilarityClass& o) const { return !(*this == o); }
  bool operator<(const SimilarityClass& o) const { return sort_key() < o.sort_key(); }
  std::vector<uint32_t> sort_key() const;
  std::string text() const;

private:
  const FieldCtx* f_;
  int n_;
  InvariantFactors factors_;
  uint16_t det_, trace_;
};

/// An SL(n,K) conjugacy class: GL closure of determinant one plus a label,
/// the canonical representative of a coset of the centralizer determinant
/// image in K* (label 1 = the class of the companion-form representative).
class SLClass {
public:
  SLClass(SimilarityClass closure, uint16_t label, DetImage image);

  const SimilarityClass& closure() const { return closure_; }
  uint16_t label() const { return label_; }
  const DetImage& det_image() const { return image_; }
  const FieldCtx& ctx() const { return closure_.ctx(); }
  int n() const { return closure_.n(); }

  bool scalar() const { return closure_.scalar(); }
  bool cyclic() const { return closure_.cyclic(); }
  /// True when the GL closure does not split, i.e. the SL class is a full
  /// similarity class.
  bool is_similarity_class() const { return image_.full(ctx()); }
  int split_count() const { return int((ctx().order() - 1) / image_.members.size()); }

  Matrix representative() const;

  bool operator==(const SLClass& o) const;
  bool operator!=(const SLClass& o) const { return !(*this == o); }
  bool operator<(const SLClass& o) const;
  std::string text() const;

private:
  SimilarityClass closure_;
  uint16_t label_;
  DetImage image_;
};

using AnyClass = std::variant<SimilarityClass, SLClass>;

const SimilarityClass& closure_of(const AnyClass& c);
Matrix representative(const AnyClass& c);
std::string class_text(const AnyClass& c);

SimilarityClass class_of(const Matrix& A);
/// group = SL requires det(A) = 1.
AnyClass class_of(const Matrix& A, Group group);

/// Canonical coset representative of v * image in K*.
uint16_t coset_label(const FieldCtx& F, uint16_t v, const DetImage& image);

/// All SL classes inside one determinant-one GL closure, by label order.
std::vector<SLClass> sl_split(const SimilarityClass& closure);

/// All classes of total degree n, canonical order. GL restricts to
/// nonsingular chains; SL restricts to determinant one and splits.
std::vector<AnyClass> enumerate_classes(int n, const FieldCtx& F, Group group);

/// min over eigenvalues l in the algebraic closure of rank(A - l), from the
/// invariant-factor structure.
int minimal_rank(const Matrix& A);

struct TraceSet {
  const FieldCtx* ctx;
  std::vector<uint16_t> members;  // sorted
  bool complete = false;          // members == K

  bool contains(uint16_t v) const;
};

/// Class text: comma-separated monic invariant factors in x, optionally
/// "@label=t" for SL classes, e.g. "x-1,(x-1)^2" or "x^3+x+1@label=2".
AnyClass parse_class_text(const FieldCtx& F, const std::string& text, Group group);
Poly parse_poly(const FieldCtx& F, const std::string& text);
uint16_t parse_element(const FieldCtx& F, const std::string& text);

}  // namespace traceprod
