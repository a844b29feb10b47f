#pragma once

#include <json.hpp>
#include <unordered_set>

#include "traceprod/witness.hpp"

namespace traceprod {

using ordered_json = nlohmann::ordered_json;

constexpr uint64_t kDefaultOrbitBudget = 50'000'000;

/// Conjugation generators: transvections span SL; a primitive diagonal
/// extends them to GL.
std::vector<Matrix> conjugation_generators(const FieldCtx& F, int n, Group group);

/// Breadth-first conjugation orbit, streamed in a deterministic order and
/// deduplicated by canonical encoding. Throws BudgetExceeded past `budget`
/// discovered elements.
class OrbitStream {
public:
  OrbitStream(Matrix rep, Group group, uint64_t budget = kDefaultOrbitBudget);
  /// Element #i of the orbit, materializing lazily; nullptr past the end.
  const Matrix* at(size_t i);
  bool exhausted() const { return queue_pos_ >= elems_.size() && done_; }
  size_t discovered() const { return elems_.size(); }

private:
  std::vector<Matrix> elems_;
  std::unordered_set<std::string> seen_;
  std::vector<Matrix> gens_;
  size_t queue_pos_ = 0;
  bool done_ = false;
  uint64_t budget_;

  void expand_next();
};

/// Shared per-report cache of orbit streams keyed by class identity.
class OrbitCache {
public:
  explicit OrbitCache(uint64_t budget = kDefaultOrbitBudget) : budget_(budget) {}
  OrbitStream& stream(const AnyClass& cls, Group conj_group);

private:
  uint64_t budget_;
  std::map<std::string, std::unique_ptr<OrbitStream>> streams_;
};

/// {tr(w p0) : w in orbit(Omega)} with p0 a fixed representative of Psi;
/// early_exit stops as soon as every field element has appeared.
TraceSet trace_set(const AnyClass& omega, const AnyClass& psi, bool early_exit,
                   OrbitCache& cache);
TraceSet trace_set(const AnyClass& omega, const AnyClass& psi, bool early_exit = true,
                   uint64_t budget = kDefaultOrbitBudget);

/// The exact set of classes met by {w p0 : w in orbit(Omega)}.
std::vector<AnyClass> class_product_decomposition(const AnyClass& omega, const AnyClass& psi,
                                                  uint64_t budget = kDefaultOrbitBudget);

struct VerificationReport {
  ordered_json data;
  bool ok = true;
  double seconds = 0;  // reported on stderr only, never serialized
};

enum class VerifyMode { Exhaustive, Sampled };

/// Every (sampled) ordered nonscalar class pair: the oracle trace set must
/// equal K and the constructive witness must succeed for every tau. At
/// n = 2 the check becomes agreement with the 2x2 dichotomy.
VerificationReport verify_theorem(int n, const FieldCtx& F, Group group, VerifyMode mode,
                                  uint64_t sample_count = 0, uint64_t seed = kDefaultSeed,
                                  uint64_t budget = kDefaultOrbitBudget,
                                  bool with_witnesses = true, uint64_t oracle_pair_cap = 0);

/// Oracle-only check of the full-trace-set property for pairs of
/// irreducible 2x2 classes (stated without proof in the source material).
VerificationReport verify_gl2_irreducible_claim(const FieldCtx& F,
                                                uint64_t budget = kDefaultOrbitBudget);

/// Product-of-classes check: every product of two nontrivial classes
/// decomposes into at least two classes, and the report records whether at
/// least q classes appear.
VerificationReport product_class_check(int n, const FieldCtx& F,
                                       uint64_t budget = kDefaultOrbitBudget);

/// Extension-field minimal-rank oracle: min over eigenvalues in the
/// splitting fields of rank(A - l I).
int minimal_rank_bruteforce(const Matrix& A);

}  // namespace traceprod
