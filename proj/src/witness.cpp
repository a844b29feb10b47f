#include "traceprod/witness.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

namespace traceprod {

namespace {

// ---------- shared helpers ----------

void require(bool cond, Err kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

Matrix block2(const Matrix& A, const Matrix& B) { return Matrix::direct_sum({A, B}); }

// det of a polynomial matrix by Laplace expansion (desk-scale sizes)
Poly polymat_det(const std::vector<std::vector<Poly>>& M, const FieldCtx& F) {
  size_t n = M.size();
  if (n == 0) return Poly::constant(F, 1);
  if (n == 1) return M[0][0];
  Poly acc(F);
  for (size_t j = 0; j < n; ++j) {
    if (M[0][j].is_zero()) continue;
    std::vector<std::vector<Poly>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<Poly> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(M[i][k]);
      minor.push_back(std::move(row));
    }
    Poly term = M[0][j] * polymat_det(minor, F);
    if (j % 2) term = term * F.neg(1);
    acc = acc + term;
  }
  return acc;
}

// column `pos` of adj(xI - N): adj[j][pos] = (-1)^{pos+j} det(minor_{pos,j})
std::vector<Poly> adj_column(const Matrix& N, int pos) {
  const FieldCtx& F = N.ctx();
  int n = N.rows();
  std::vector<std::vector<Poly>> M0(n, std::vector<Poly>(n, Poly(F)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<uint16_t> c = {F.neg(N.at(i, j))};
      if (i == j) c.push_back(1);
      M0[i][j] = Poly(F, std::move(c));
    }
  std::vector<Poly> out;
  for (int j = 0; j < n; ++j) {
    std::vector<std::vector<Poly>> minor;
    for (int i = 0; i < n; ++i) {
      if (i == pos) continue;
      std::vector<Poly> row;
      for (int k = 0; k < n; ++k)
        if (k != j) row.push_back(M0[i][k]);
      minor.push_back(std::move(row));
    }
    Poly d = polymat_det(minor, F);
    if ((pos + j) % 2) d = d * F.neg(1);
    out.push_back(d);
  }
  return out;
}

// Rows r such that charpoly(N + e_pos * r) = target, honoring fixed entries;
// charpoly(N + e_pos r) = x^n - sum_j r_j * adj(xI-N)[j][pos].
std::vector<std::vector<uint16_t>> charpoly_row_solutions(const Matrix& N, int pos,
                                                          const std::map<int, uint16_t>& fixed,
                                                          const Poly& target, size_t limit) {
  const FieldCtx& F = N.ctx();
  int n = N.rows();
  auto g = adj_column(N, pos);
  Poly rhs = Poly::x(F).pow(n) - target;
  std::vector<int> free_cols;
  for (int j = 0; j < n; ++j) {
    auto it = fixed.find(j);
    if (it != fixed.end())
      rhs = rhs - g[j] * it->second;
    else
      free_cols.push_back(j);
  }
  if (rhs.degree() >= n) return {};
  std::vector<std::vector<uint16_t>> eqs(n, std::vector<uint16_t>(free_cols.size(), 0));
  std::vector<uint16_t> b(n, 0);
  for (int k = 0; k < n; ++k) {
    for (size_t t = 0; t < free_cols.size(); ++t) eqs[k][t] = g[free_cols[t]].coeff(k);
    b[k] = rhs.coeff(k);
  }
  auto part = solve_linear(eqs, b, F);
  if (!part) return {};
  auto null_basis = nullspace(std::move(eqs), int(free_cols.size()), F);
  std::vector<std::vector<uint16_t>> out;
  auto emit = [&](const std::vector<uint16_t>& y) {
    std::vector<uint16_t> row(n, 0);
    for (auto& [j, v] : fixed) row[j] = v;
    for (size_t t = 0; t < free_cols.size(); ++t) row[free_cols[t]] = y[t];
    out.push_back(std::move(row));
  };
  emit(*part);
  uint32_t q = F.order();
  uint64_t combos = 1;
  for (size_t t = 0; t < null_basis.size() && combos < limit; ++t) combos *= q;
  for (uint64_t idx = 1; idx < std::min<uint64_t>(combos, limit); ++idx) {
    std::vector<uint16_t> y = *part;
    uint64_t v = idx;
    for (size_t t = 0; t < null_basis.size() && v; ++t) {
      uint16_t c = uint16_t(v % q);
      v /= q;
      if (!c) continue;
      for (size_t u = 0; u < y.size(); ++u) y[u] = F.add(y[u], F.mul(c, null_basis[t][u]));
    }
    emit(y);
  }
  return out;
}

bool matrix_in_cyclic_class(const Matrix& M, const Poly& f) {
  return charpoly(M) == f && minpoly(M) == f;
}

}  // namespace

// ---------- block-triangular product factorization ----------

std::optional<Lemma22Result> try_lemma22(const SimilarityClass& omega,
                                         const SimilarityClass& psi, const Matrix& D) {
  const FieldCtx& F = omega.ctx();
  int n = omega.n();
  require(psi.n() == n && n >= 2, Err::Usage, "factorization needs equal class sizes >= 2");
  require(omega.cyclic() && psi.cyclic(), Err::Usage, "factorization needs cyclic classes");
  require(D.rows() == n - 1 && D.cols() == n - 1, Err::DimensionMismatch,
          "D must be (n-1)x(n-1)");
  if (!D.det()) return std::nullopt;
  auto lu = lu_decompose(D);
  if (!lu) return std::nullopt;
  const Matrix &L = lu->first, &U = lu->second;  // L unitriangular, det U = det D

  auto sign_adjust = [&](uint16_t v) { return (n % 2 == 0) ? F.neg(v) : v; };  // (-1)^{n-1}
  uint16_t beta = sign_adjust(omega.det());
  uint16_t gamma = F.mul(sign_adjust(psi.det()), F.inv(U.det()));

  const Poly& fW = omega.minimal_poly();
  const Poly& fQ = psi.minimal_poly();

  auto pick_completion = [&](const Matrix& N, int pos, const std::map<int, uint16_t>& fixed,
                             const Poly& f) -> std::optional<Matrix> {
    for (auto& row : charpoly_row_solutions(N, pos, fixed, f, 2048)) {
      Matrix M = N;
      M.set_row(pos, row);
      if (matrix_in_cyclic_class(M, f)) return M;
    }
    // bounded exhaustive sweep over the free entries
    std::vector<int> free_cols;
    for (int j = 0; j < n; ++j)
      if (!fixed.count(j)) free_cols.push_back(j);
    uint64_t total = 1;
    for (size_t i = 0; i < free_cols.size(); ++i) {
      total *= F.order();
      if (total > (1u << 20)) return std::nullopt;
    }
    for (uint64_t idx = 0; idx < total; ++idx) {
      std::vector<uint16_t> row(n, 0);
      for (auto& [j, v] : fixed) row[j] = v;
      uint64_t t = idx;
      for (int j : free_cols) {
        row[j] = uint16_t(t % F.order());
        t /= F.order();
      }
      Matrix M = N;
      M.set_row(pos, row);
      if (matrix_in_cyclic_class(M, f)) return M;
    }
    return std::nullopt;
  };

  // W = [[y, beta],[L, 0]]: strictly lower base plus an unknown top row
  Matrix NW(F, n, n);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j <= n - 2; ++j) NW.set(i, j, L.at(i - 1, j));
  auto W = pick_completion(NW, 0, {{n - 1, beta}}, fW);
  if (!W) return std::nullopt;

  // Q = [[0, U],[gamma, x]]: strictly upper base plus an unknown bottom row
  Matrix NQ(F, n, n);
  for (int i = 0; i <= n - 2; ++i)
    for (int j = 1; j < n; ++j) NQ.set(i, j, U.at(i, j - 1));
  auto Q = pick_completion(NQ, n - 1, {{0, gamma}}, fQ);
  if (!Q) return std::nullopt;

  Lemma22Result res;
  res.W = *W;
  res.Q = *Q;
  res.product = (*W) * (*Q);
  res.delta = F.mul(beta, gamma);
  require(res.product.at(0, 0) == res.delta, Err::InternalInconsistency, "factorization corner");
  for (int i = 1; i < n; ++i)
    require(res.product.at(i, 0) == 0, Err::InternalInconsistency, "factorization first column");
  require(res.product.submatrix(1, 1, n - 1, n - 1) == D, Err::InternalInconsistency,
          "factorization lower block");
  return res;
}

Lemma22Result lemma22_factor(const SimilarityClass& omega, const SimilarityClass& psi,
                             const Matrix& D) {
  if (!D.det() || !lu_decompose(D))
    throw Error(Err::NoLU, "D has a vanishing leading principal minor");
  auto r = try_lemma22(omega, psi, D);
  if (!r) throw Error(Err::SolveFailed, "no cyclic completion found for the prescribed rows");
  return *r;
}

namespace {

// (A', B') with A' in clsA, B' in clsB and A'B' equal to lambda (+) M
// exactly; requires lambda*det(M) = det(clsA)det(clsB) and M - lambda I
// invertible.
std::optional<std::pair<Matrix, Matrix>> cyclic_pair_with_product(const SimilarityClass& clsA,
                                                                  const SimilarityClass& clsB,
                                                                  uint16_t lambda,
                                                                  const Matrix& M) {
  const FieldCtx& F = clsA.ctx();
  int m = clsA.n();
  auto r = try_lemma22(clsA, clsB, M);
  if (!r) return std::nullopt;
  std::vector<uint16_t> z(m - 1);
  for (int j = 1; j < m; ++j) z[j - 1] = r->product.at(0, j);
  Matrix shift = M - Matrix::scalar(F, m - 1, lambda);
  auto inv = shift.inverse_opt();
  if (!inv) return std::nullopt;
  std::vector<uint16_t> w = vec_mat(z, *inv);
  Matrix G = Matrix::identity(F, m);
  for (int j = 1; j < m; ++j) G.set(0, j, w[j - 1]);
  Matrix A1 = conjugate(r->W, G), B1 = conjugate(r->Q, G);
  Matrix target(F, m, m);
  target.set(0, 0, lambda);
  target.paste(1, 1, M);
  if (A1 * B1 != target) return std::nullopt;
  return std::make_pair(A1, B1);
}

// candidate (lambda, M) pairs with lambda * det(M) = d0, M LU-admissible
// and M - lambda I invertible, deterministic order
std::vector<std::pair<uint16_t, Matrix>> lambda_M_candidates(const FieldCtx& F, int s,
                                                             uint16_t d0, size_t cap = 4096) {
  std::vector<std::pair<uint16_t, Matrix>> out;
  auto ok = [&](uint16_t lam, const Matrix& M) {
    if (!M.det() || M.det() != F.mul(d0, F.inv(lam))) return false;
    if (!(M - Matrix::scalar(F, s, lam)).det()) return false;
    return lu_decompose(M).has_value();
  };
  for (uint32_t lam = 1; lam < F.order() && out.size() < cap; ++lam) {
    uint16_t dM = F.mul(d0, F.inv(uint16_t(lam)));
    if (s == 1) {
      Matrix M(F, 1, 1);
      M.set(0, 0, dM);
      if (ok(uint16_t(lam), M)) out.push_back({uint16_t(lam), M});
      continue;
    }
    for (uint32_t t = 0; t < F.order(); ++t) {
      for (uint32_t a = 1; a < F.order(); ++a) {
        uint16_t t2 = F.sub(uint16_t(t), F.from_int(s - 2));
        uint16_t d = F.sub(t2, uint16_t(a));
        uint16_t c = F.sub(F.mul(uint16_t(a), d), dM);
        Matrix M = Matrix::identity(F, s);
        M.set(0, 0, uint16_t(a));
        M.set(0, 1, 1);
        M.set(1, 0, c);
        M.set(1, 1, d);
        if (ok(uint16_t(lam), M)) {
          out.push_back({uint16_t(lam), M});
          break;
        }
      }
    }
  }
  if (!out.empty()) return out;
  uint64_t total = 1;
  for (int i = 0; i < s * s; ++i) {
    total *= F.order();
    if (total > 500000) break;
  }
  total = std::min<uint64_t>(total, 500000);
  for (uint32_t lam = 1; lam < F.order() && out.size() < cap; ++lam) {
    for (uint64_t idx = 0; idx < total; ++idx) {
      Matrix M(F, s, s);
      uint64_t t = idx;
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
          M.set(i, j, uint16_t(t % F.order()));
          t /= F.order();
        }
      if (ok(uint16_t(lam), M)) out.push_back({uint16_t(lam), M});
      if (out.size() >= cap) break;
    }
  }
  return out;
}

// monic degree-m polynomials with prescribed trace and determinant, free
// middle coefficients in odometer order
std::vector<Poly> polys_with_trace_det(const FieldCtx& F, int m, uint16_t tr, uint16_t det) {
  std::vector<Poly> out;
  uint16_t c0 = (m % 2) ? F.neg(det) : det;
  uint16_t cm1 = F.neg(tr);
  int frees = std::max(0, m - 2);
  uint64_t total = 1;
  for (int i = 0; i < frees; ++i) total *= F.order();
  for (uint64_t idx = 0; idx < total; ++idx) {
    std::vector<uint16_t> c(m + 1, 0);
    c[0] = c0;
    c[m] = 1;
    if (m >= 2) c[m - 1] = cm1;
    uint64_t t = idx;
    for (int i = 1; i <= m - 2; ++i) {
      c[i] = uint16_t(t % F.order());
      t /= F.order();
    }
    out.push_back(Poly(F, std::move(c)));
  }
  return out;
}

}  // namespace

// ---------- interleaved normal form ----------

InterleaveForm interleave_form(const Matrix& c) {
  const FieldCtx& F = c.ctx();
  int n = c.rows();
  require(n >= 2, Err::Usage, "interleave needs n >= 2");
  require(c.det() != 0, Err::Usage, "interleave needs an invertible matrix");
  auto v = cyclic_vector(c);
  if (!v) throw Error(Err::NotCyclic, "matrix has no cyclic vector");
  std::vector<std::vector<uint16_t>> p;
  p.push_back(*v);
  for (int i = 1; i <= n; ++i) p.push_back(vec_mat(p.back(), c));

  InterleaveForm out;
  out.odd = (n % 2 != 0);
  int m = n / 2;
  out.m = m;
  Matrix T(F, n, n);
  if (!out.odd) {
    for (int i = 0; i < m; ++i) T.set_row(i, p[2 * i]);
    for (int i = 0; i < m; ++i) T.set_row(m + i, p[2 * i + 1]);
    if (!T.det()) throw Error(Err::DegenerateBasis, "interleaved vectors are dependent");
    Matrix form = T * c * T.inverse();
    out.conjugator = T.inverse();
    out.form = form;
    Matrix C = form.submatrix(m, 0, m, m);
    require(form.submatrix(0, 0, m, m).is_zero(), Err::InternalInconsistency, "even form 0 block");
    require(form.submatrix(0, m, m, m).is_identity(), Err::InternalInconsistency,
            "even form I block");
    require(C.det() != 0 && minpoly(C).degree() == m, Err::InternalInconsistency,
            "even form C not cyclic invertible");
    return out;
  }
  // odd: v, v c^2, ..., v c^{2m-2}, w = v c^{2m} + v, v c, ..., v c^{2m-1}
  for (int i = 0; i < m; ++i) T.set_row(i, p[2 * i]);
  std::vector<uint16_t> w(n);
  for (int j = 0; j < n; ++j) w[j] = F.add(p[2 * m][j], p[0][j]);
  T.set_row(m, w);
  for (int i = 0; i < m; ++i) T.set_row(m + 1 + i, p[2 * i + 1]);
  if (!T.det()) throw Error(Err::DegenerateBasis, "interleaved vectors are dependent");
  Matrix form0 = T * c * T.inverse();
  Matrix C = form0.submatrix(m + 1, 0, m, m);
  require(C.det() != 0, Err::InternalInconsistency, "odd form C singular");
  // clear the a-row with the unipotent middle conjugation
  std::vector<uint16_t> a(m);
  for (int j = 0; j < m; ++j) a[j] = form0.at(m, j);
  std::vector<uint16_t> aCinv = vec_mat(a, C.inverse());
  Matrix P = Matrix::identity(F, n);
  for (int j = 0; j < m; ++j) P.set(m, m + 1 + j, aCinv[j]);
  Matrix form = conjugate(form0, P);
  out.conjugator = T.inverse() * P;
  out.form = form;
  require(form.submatrix(0, 0, m, m).is_zero() && form.submatrix(0, m, m, 1).is_zero(),
          Err::InternalInconsistency, "odd form top blocks");
  require(form.submatrix(0, m + 1, m, m).is_identity(), Err::InternalInconsistency,
          "odd form I block");
  for (int j = 0; j < m; ++j)
    require(form.at(m, j) == 0, Err::InternalInconsistency, "odd form middle row");
  Matrix C2 = form.submatrix(m + 1, 0, m, m);
  require(C2 == C && minpoly(C2).degree() == m, Err::InternalInconsistency,
          "odd form C not cyclic");
  return out;
}

// ---------- verification ----------

namespace {

void verify_pair(const WitnessPair& wp, const AnyClass& omega, const AnyClass& psi, uint16_t tau,
                 Group group) {
  require(wp.product == wp.W * wp.Q, Err::InternalInconsistency, "stored product mismatch");
  require(wp.product.trace() == tau, Err::InternalInconsistency, "trace mismatch");
  if (group == Group::SL) {
    auto cw = class_of(wp.W, Group::SL);
    auto cq = class_of(wp.Q, Group::SL);
    require(std::get<SLClass>(cw) == std::get<SLClass>(omega), Err::InternalInconsistency,
            "W not in Omega (SL)");
    require(std::get<SLClass>(cq) == std::get<SLClass>(psi), Err::InternalInconsistency,
            "Q not in Psi (SL)");
  } else {
    require(class_of(wp.W) == closure_of(omega), Err::InternalInconsistency, "W not in Omega");
    require(class_of(wp.Q) == closure_of(psi), Err::InternalInconsistency, "Q not in Psi");
  }
}

WitnessPair make_verified(Matrix W, Matrix Q, uint16_t tau, std::string path,
                          std::vector<std::pair<std::string, Matrix>> steps,
                          const AnyClass& omega, const AnyClass& psi, Group group) {
  WitnessPair wp;
  wp.product = W * Q;
  wp.W = std::move(W);
  wp.Q = std::move(Q);
  wp.tau = tau;
  wp.path = std::move(path);
  wp.steps = std::move(steps);
  verify_pair(wp, omega, psi, tau, group);
  return wp;
}

WitnessPair swap_sides(WitnessPair wp) {
  std::swap(wp.W, wp.Q);
  wp.product = wp.W * wp.Q;
  wp.path += "/swapped";
  return wp;
}

}  // namespace

// ---------- 2x2 ----------

WitnessResult witness_2x2(const SimilarityClass& omega, const SimilarityClass& psi, uint16_t tau) {
  const FieldCtx& F = omega.ctx();
  require(omega.n() == 2 && psi.n() == 2, Err::Usage, "wrong class sizes for the 2x2 path");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");
  if (omega.irreducible()) throw Error(Err::IrreducibleOmega, "Omega has no rational eigenvalue");

  uint16_t c = psi.trace(), dP = psi.det();
  auto roots = omega.rational_eigenvalues();
  AnyClass om = omega, ps = psi;

  if (roots.size() == 2) {  // distinct eigenvalues: every trace is reachable
    uint16_t alpha = roots[0], lam = roots[1];
    uint16_t mu = F.sub(tau, F.mul(lam, c));
    Matrix W(F, 2, 2);
    W.set(0, 0, alpha);
    W.set(1, 0, mu);
    W.set(1, 1, lam);
    Matrix Q(F, 2, 2);
    Q.set(0, 1, 1);
    Q.set(1, 0, F.neg(dP));
    Q.set(1, 1, c);
    return make_verified(W, Q, tau, "2x2/split", {}, om, ps, Group::M_similarity);
  }

  uint16_t alpha = roots[0];  // minimal polynomial (x - alpha)^2
  uint16_t excluded = F.mul(alpha, c);
  if (tau != excluded) {
    uint16_t nu = F.sub(tau, excluded);
    Matrix W(F, 2, 2);
    W.set(0, 0, alpha);
    W.set(0, 1, 1);
    W.set(1, 1, alpha);
    Matrix Q(F, 2, 2);  // trace c, det dP, lower-left nu != 0
    Q.set(0, 0, c);
    Q.set(0, 1, F.neg(F.mul(dP, F.inv(nu))));
    Q.set(1, 0, nu);
    return make_verified(W, Q, tau, "2x2/primary-offdiag", {}, om, ps, Group::M_similarity);
  }
  if (psi.irreducible()) return TraceExcluded{excluded};
  // tau = alpha * tr(Psi) with Psi reducible: a triangular pair suffices
  auto proots = psi.rational_eigenvalues();
  uint16_t s1 = proots[0], s2 = proots.size() == 2 ? proots[1] : proots[0];
  Matrix W(F, 2, 2);
  W.set(0, 0, alpha);
  W.set(0, 1, 1);
  W.set(1, 1, alpha);
  Matrix Q(F, 2, 2);
  Q.set(0, 0, s1);
  Q.set(0, 1, proots.size() == 2 ? 0 : 1);
  Q.set(1, 1, s2);
  return make_verified(W, Q, tau, "2x2/primary-triangular", {}, om, ps, Group::M_similarity);
}

TraceDichotomy trace_dichotomy_2x2(const SimilarityClass& omega, const SimilarityClass& psi) {
  require(omega.n() == 2 && psi.n() == 2, Err::Usage, "wrong class sizes for the 2x2 path");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");
  if (omega.irreducible()) throw Error(Err::IrreducibleOmega, "Omega has no rational eigenvalue");
  TraceDichotomy out;
  out.full = !(omega.primary() && psi.irreducible());
  if (!out.full) {
    uint16_t alpha = omega.rational_eigenvalues()[0];
    out.excluded = omega.ctx().mul(alpha, psi.trace());
  }
  return out;
}

// ---------- corner planting ----------

namespace {

// conjugate of `phi` with exact top-left 2x2 block A, by searching basis
// pairs (v1, v2) together with a complement absorbing the residues
std::optional<Matrix> plant_corner_2x2(const Matrix& phi, const Matrix& A, uint64_t seed) {
  const FieldCtx& F = phi.ctx();
  int n = phi.rows();
  uint32_t q = F.order();
  uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= q;

  auto decode = [&](uint64_t idx) {
    std::vector<uint16_t> v(n);
    for (int i = 0; i < n; ++i) {
      v[i] = uint16_t(idx % q);
      idx /= q;
    }
    return v;
  };
  auto attempt = [&](const std::vector<uint16_t>& v1,
                     const std::vector<uint16_t>& v2) -> std::optional<Matrix> {
    std::vector<std::vector<uint16_t>> b1 = {v1, v2};
    if (rref(b1, F).size() != 2) return std::nullopt;
    std::vector<uint16_t> w1 = vec_mat(v1, phi), w2 = vec_mat(v2, phi);
    for (int j = 0; j < n; ++j) {
      w1[j] = F.sub(w1[j], F.add(F.mul(A.at(0, 0), v1[j]), F.mul(A.at(0, 1), v2[j])));
      w2[j] = F.sub(w2[j], F.add(F.mul(A.at(1, 0), v1[j]), F.mul(A.at(1, 1), v2[j])));
    }
    std::vector<std::vector<uint16_t>> wr = {w1, w2};
    size_t dimW = rref(wr, F).size();
    std::vector<std::vector<uint16_t>> jr = {v1, v2, w1, w2};
    if (rref(jr, F).size() != 2 + dimW) return std::nullopt;
    if (int(dimW) > n - 2) return std::nullopt;
    std::vector<std::vector<uint16_t>> basis = {v1, v2};
    for (auto& w : wr) basis.push_back(w);
    for (int i = 0; i < n && int(basis.size()) < n; ++i) {
      std::vector<uint16_t> e(n, 0);
      e[i] = 1;
      auto trial = basis;
      trial.push_back(e);
      if (rref(trial, F).size() == basis.size() + 1) basis.push_back(e);
    }
    if (int(basis.size()) != n) return std::nullopt;
    Matrix T(F, n, n);
    for (int i = 0; i < n; ++i) T.set_row(i, basis[i]);
    if (!T.det()) return std::nullopt;
    Matrix form = T * phi * T.inverse();
    if (form.submatrix(0, 0, 2, 2) != A) return std::nullopt;
    return form;
  };

  for (uint64_t i1 = 1; i1 < total; ++i1) {
    auto v1 = decode(i1);
    for (uint64_t i2 = 1; i2 < total; ++i2) {
      if (i2 == i1) continue;
      auto r = attempt(v1, decode(i2));
      if (r) return r;
    }
  }
  SplitMix64 rng(seed);
  for (int t = 0; t < 20000; ++t) {
    auto r = attempt(decode(1 + rng.next() % (total - 1)), decode(1 + rng.next() % (total - 1)));
    if (r) return r;
  }
  return std::nullopt;
}

}  // namespace

Matrix sourour_embed(const Matrix& M, const Matrix& A, uint64_t seed) {
  const FieldCtx& F = M.ctx();
  int n = M.rows(), m = A.rows();
  require(M.square() && A.square(), Err::Usage, "square inputs required");
  require(M.det() != 0, Err::PreconditionViolated, "M must be invertible");
  require(2 * m <= n, Err::PreconditionViolated, "need m <= n/2");
  require(m <= minimal_rank(M), Err::PreconditionViolated, "need m <= minimal rank of M");
  if (M.submatrix(0, 0, m, m) == A) return Matrix::identity(F, n);

  uint32_t q = F.order();
  uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= q;
  auto decode = [&](uint64_t idx) {
    std::vector<uint16_t> v(n);
    for (int i = 0; i < n; ++i) {
      v[i] = uint16_t(idx % q);
      idx /= q;
    }
    return v;
  };

  struct Echelon {
    std::vector<std::vector<uint16_t>> rows;
    const FieldCtx* F;
    bool add(std::vector<uint16_t> v) {
      for (auto& r : rows) {
        int piv = -1;
        for (size_t j = 0; j < r.size(); ++j)
          if (r[j]) {
            piv = int(j);
            break;
          }
        if (piv >= 0 && v[piv]) {
          uint16_t f = F->mul(v[piv], F->inv(r[piv]));
          for (size_t j = 0; j < v.size(); ++j) v[j] = F->sub(v[j], F->mul(f, r[j]));
        }
      }
      for (auto x : v)
        if (x) {
          rows.push_back(v);
          return true;
        }
      return false;
    }
  };

  // v_1..v_m with {v_i} union {v_i M} independent
  std::vector<std::vector<uint16_t>> vs;
  long budget = 2000000;
  std::function<bool(Echelon&)> dfs = [&](Echelon& ech) -> bool {
    if (int(vs.size()) == m) return true;
    for (uint64_t idx = 1; idx < total; ++idx) {
      if (--budget <= 0) return false;
      auto v = decode(idx);
      Echelon saved = ech;
      if (ech.add(v) && ech.add(vec_mat(v, M))) {
        vs.push_back(v);
        if (dfs(ech)) return true;
        vs.pop_back();
      }
      ech = saved;
    }
    return false;
  };
  Echelon ech;
  ech.F = &F;
  if (!dfs(ech)) {
    vs.clear();
    SplitMix64 rng(seed);
    for (int attempt = 0; attempt < 2000 && vs.empty(); ++attempt) {
      Echelon e2;
      e2.F = &F;
      std::vector<std::vector<uint16_t>> cand;
      bool ok = true;
      for (int t = 0; t < m && ok; ++t) {
        ok = false;
        for (int tries = 0; tries < 200; ++tries) {
          auto v = decode(1 + rng.next() % (total - 1));
          Echelon saved = e2;
          if (e2.add(v) && e2.add(vec_mat(v, M))) {
            cand.push_back(v);
            ok = true;
            break;
          }
          e2 = saved;
        }
      }
      if (ok && int(cand.size()) == m) vs = cand;
    }
    if (vs.empty()) throw Error(Err::EmbedSearchFailed, "no independent (v, vM) family found");
  }

  Matrix T(F, n, n);
  for (int i = 0; i < m; ++i) T.set_row(i, vs[i]);
  for (int i = 0; i < m; ++i) T.set_row(m + i, vec_mat(vs[i], M));
  int placed = 2 * m;
  for (int i = 0; i < n && placed < n; ++i) {
    std::vector<uint16_t> e(n, 0);
    e[i] = 1;
    Matrix trial = T;
    trial.set_row(placed, e);
    if (trial.submatrix(0, 0, placed + 1, n).rank() == placed + 1) {
      T.set_row(placed, e);
      ++placed;
    }
  }
  require(placed == n && T.det() != 0, Err::InternalInconsistency, "basis completion failed");
  // top m rows of T M T^{-1} are (0 | I | 0); shear the A block in
  Matrix Linv = Matrix::identity(F, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Linv.set(m + i, j, A.at(i, j));
  Matrix X = T.inverse() * Linv;
  Matrix form = conjugate(M, X);
  require(form.submatrix(0, 0, m, m) == A, Err::InternalInconsistency, "planted corner mismatch");
  require(invariant_factors(form) == invariant_factors(M), Err::InternalInconsistency,
          "embedding changed the class");
  return X;
}

// ---------- theorem-1 construction ----------

namespace {

Matrix rep_big_block_first(const SimilarityClass& cls) {
  auto& chain = cls.factors().chain;
  std::vector<Matrix> blocks;
  blocks.push_back(Matrix::companion(chain.back()));
  for (size_t i = 0; i + 1 < chain.size(); ++i) blocks.push_back(Matrix::companion(chain[i]));
  return Matrix::direct_sum(blocks);
}

Matrix psi_tail_blocks(const SimilarityClass& cls) {
  auto& chain = cls.factors().chain;
  std::vector<Matrix> blocks;
  for (size_t i = 0; i + 1 < chain.size(); ++i) blocks.push_back(Matrix::companion(chain[i]));
  if (blocks.empty()) return Matrix(cls.ctx(), 0, 0);
  return Matrix::direct_sum(blocks);
}

Matrix lu_matrix_with(const FieldCtx& F, int s, uint16_t det, uint16_t tr) {
  Matrix M = Matrix::identity(F, s);
  uint16_t t2 = F.sub(tr, F.from_int(s - 2));
  uint16_t a = t2 ? t2 : 1;
  uint16_t d = F.sub(t2, a);
  M.set(0, 0, a);
  M.set(0, 1, 1);
  M.set(1, 0, F.sub(F.mul(a, d), det));
  M.set(1, 1, d);
  return M;
}

// cache values are stored context-free (entry vectors), since callers own
// their FieldCtx lifetimes
std::mutex g_plant_mutex;
std::map<std::string, std::optional<std::vector<uint16_t>>> g_plant_cache;

std::optional<Matrix> plant_corner_cached(const SimilarityClass& omega, const Matrix& A,
                                          uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  int n = omega.n();
  auto rebuild = [&](const std::vector<uint16_t>& flat) {
    Matrix M(F, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M.set(i, j, flat[size_t(i) * n + j]);
    return M;
  };
  std::string key = F.key() + "|" + omega.text() + "|" + A.encode();
  {
    std::lock_guard<std::mutex> lock(g_plant_mutex);
    auto it = g_plant_cache.find(key);
    if (it != g_plant_cache.end()) {
      if (!it->second) return std::nullopt;
      return rebuild(*it->second);
    }
  }
  Matrix rep = omega.representative();
  std::optional<Matrix> planted;
  if (n >= 4 && rep.det() != 0 && minimal_rank(rep) >= 2) {
    try {
      Matrix T = sourour_embed(rep, A, seed);
      planted = conjugate(rep, T);
    } catch (const Error&) {
      planted.reset();
    }
  }
  if (!planted) planted = plant_corner_2x2(rep, A, seed);
  std::optional<std::vector<uint16_t>> flat;
  if (planted) {
    flat.emplace();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) flat->push_back(planted->at(i, j));
  }
  std::lock_guard<std::mutex> lock(g_plant_mutex);
  g_plant_cache.emplace(key, std::move(flat));
  return planted;
}

// Member of Omega whose top-left 2x2 block A makes the (A, R) trace set all
// of K: a split-diagonal corner, or a Jordan-type corner when R is not
// irreducible. The corner prescribed in the source construction does not
// exist in every class, so candidates are searched in a deterministic order.
std::pair<Matrix, Matrix> plant_full_pair_corner(const SimilarityClass& omega,
                                                 const SimilarityClass& clsR, uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  uint32_t q = F.order();
  auto ev = omega.rational_eigenvalues();
  auto rank_of = [&](uint16_t v) {
    for (size_t i = 0; i < ev.size(); ++i)
      if (ev[i] == v) return 0;
    return 1;
  };
  std::vector<std::pair<uint16_t, uint16_t>> diags;
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b)
      if (a != b) diags.push_back({uint16_t(a), uint16_t(b)});
  std::stable_sort(diags.begin(), diags.end(), [&](auto& x, auto& y) {
    return rank_of(x.first) + rank_of(x.second) < rank_of(y.first) + rank_of(y.second);
  });
  std::vector<Matrix> candidates;
  for (auto& [a, b] : diags) candidates.push_back(Matrix::diag(F, {a, b}));
  if (!clsR.irreducible()) {
    for (uint16_t a : ev) {
      Matrix J(F, 2, 2);
      J.set(0, 0, a);
      J.set(0, 1, 1);
      J.set(1, 1, a);
      candidates.push_back(J);
    }
  }
  for (auto& A : candidates) {
    auto planted = plant_corner_cached(omega, A, seed);
    if (planted) return {*planted, A};
  }
  throw Error(Err::ConstructionFailed, "no full-pair corner could be planted");
}

}  // namespace

WitnessPair theorem1_witness(const SimilarityClass& omega, const SimilarityClass& psi,
                             uint16_t tau, uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  int n = omega.n();
  require(psi.n() == n, Err::DimensionMismatch, "class sizes differ");
  require(n >= 3, Err::UnsupportedCase, "this construction needs n >= 3");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");

  if (psi.minimal_poly().degree() > omega.minimal_poly().degree())
    return swap_sides(theorem1_witness(psi, omega, tau, seed));

  int r = psi.minimal_poly().degree();
  Matrix R = Matrix::companion(psi.minimal_poly());
  Matrix S = psi_tail_blocks(psi);
  AnyClass om = omega, ps = psi;

  if (r >= 3) {
    Matrix W = rep_big_block_first(omega);
    require(class_of(W) == omega, Err::InternalInconsistency,
            "reordered representative left class");
    Matrix A = W.submatrix(0, 0, r, r);
    Matrix D = W.submatrix(r, r, n - r, n - r);
    uint16_t c0 = (n > r) ? (D * S).trace() : 0;
    uint16_t tau1 = F.sub(tau, c0);
    SimilarityClass clsA = class_of(A), clsR = class_of(R);
    require(clsA.cyclic(), Err::InternalInconsistency, "corner of companion not cyclic");
    uint16_t dAR = F.mul(clsA.det(), clsR.det());

    auto finish = [&](const Lemma22Result& res) -> WitnessPair {
      Matrix H = find_conjugator(res.W, A);  // res.W^H = A
      Matrix Rp = conjugate(res.Q, H);
      Matrix Qf(F, n, n);
      Qf.paste(0, 0, Rp);
      if (n > r) Qf.paste(r, r, S);
      return make_verified(W, Qf, tau, "theorem1/steered", {{"corner-transport", H}}, om, ps,
                           Group::M_similarity);
    };

    for (uint32_t e = 1; e < F.order(); ++e) {
      uint16_t delta = F.mul(dAR, F.inv(uint16_t(e)));
      Matrix D1 = lu_matrix_with(F, r - 1, uint16_t(e), F.sub(tau1, delta));
      if (!lu_decompose(D1)) continue;
      auto res = try_lemma22(clsA, clsR, D1);
      if (res) return finish(*res);
    }
    // sweep over all LU-admissible steering blocks with the right trace sum
    uint64_t total = 1;
    for (int i = 0; i < (r - 1) * (r - 1); ++i) {
      total *= F.order();
      if (total > 300000) break;
    }
    total = std::min<uint64_t>(total, 300000);
    for (uint64_t idx = 0; idx < total; ++idx) {
      Matrix D1(F, r - 1, r - 1);
      uint64_t t = idx;
      for (int i = 0; i < r - 1; ++i)
        for (int j = 0; j < r - 1; ++j) {
          D1.set(i, j, uint16_t(t % F.order()));
          t /= F.order();
        }
      uint16_t dd = D1.det();
      if (!dd || !lu_decompose(D1)) continue;
      if (F.add(F.mul(dAR, F.inv(dd)), D1.trace()) != tau1) continue;
      auto res = try_lemma22(clsA, clsR, D1);
      if (res) return finish(*res);
    }
    throw Error(Err::ConstructionFailed, "no steering block admitted a factorization");
  }

  // r = 2: plant a 2x2 corner A for which the (A, R) trace set is the full
  // field, then steer with the 2x2 machinery. A split diagonal always
  // qualifies; a Jordan-type corner also does when R is not irreducible.
  auto [W, A] = plant_full_pair_corner(omega, class_of(R), seed);
  std::vector<std::pair<std::string, Matrix>> steps;
  require(class_of(W) == omega, Err::InternalInconsistency, "planting left the class");
  Matrix D = W.submatrix(2, 2, n - 2, n - 2);
  uint16_t c0 = (S.rows() > 0) ? (D * S).trace() : 0;
  uint16_t tau1 = F.sub(tau, c0);
  auto res2 = witness_2x2(class_of(A), class_of(R), tau1);
  require(std::holds_alternative<WitnessPair>(res2), Err::InternalInconsistency,
          "full 2x2 corner pair cannot exclude traces");
  auto& w2 = std::get<WitnessPair>(res2);
  Matrix H = find_conjugator(w2.W, A);
  Matrix Rp = conjugate(w2.Q, H);
  Matrix Qf(F, n, n);
  Qf.paste(0, 0, Rp);
  if (S.rows() > 0) Qf.paste(2, 2, S);
  return make_verified(W, Qf, tau, "theorem1/corner2", steps, om, ps, Group::M_similarity);
}

// ---------- SL constructions ----------

namespace {

uint16_t required_det(const FieldCtx& F, uint16_t theta, uint16_t det_acc, const DetImage& image) {
  return coset_label(F, F.mul(theta, F.inv(det_acc)), image);
}

// Theorem-1 witness on the closures, then one diagonal conjugation of the
// pair fixes the label of the (at most one) splitting side.
WitnessPair sl_similarity_route(const SLClass& omega, const SLClass& psi, uint16_t tau,
                                uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  int n = omega.n();
  require(omega.is_similarity_class() || psi.is_similarity_class(), Err::PreconditionViolated,
          "route needs a non-splitting side");
  WitnessPair base = theorem1_witness(omega.closure(), psi.closure(), tau, seed);
  uint16_t adjust = 1;
  if (!psi.is_similarity_class()) {
    uint16_t cur = std::get<SLClass>(class_of(base.Q, Group::SL)).label();
    adjust = F.mul(psi.label(), F.inv(cur));
  } else if (!omega.is_similarity_class()) {
    uint16_t cur = std::get<SLClass>(class_of(base.W, Group::SL)).label();
    adjust = F.mul(omega.label(), F.inv(cur));
  }
  Matrix W = base.W, Q = base.Q;
  std::vector<std::pair<std::string, Matrix>> steps = base.steps;
  if (adjust != 1) {
    std::vector<uint16_t> d(n, 1);
    d[0] = adjust;
    Matrix G = Matrix::diag(F, d);
    W = conjugate(W, G);
    Q = conjugate(Q, G);
    steps.push_back({"pair-label-fix", G});
  }
  return make_verified(W, Q, tau, "sl/similarity:" + base.path, steps, omega, psi, Group::SL);
}

Matrix expand_block(const FieldCtx& F, int n, int off, const Matrix& X) {
  Matrix G = Matrix::identity(F, n);
  G.paste(off, off, X);
  return G;
}

}  // namespace

WitnessPair sl_cyclic_even(const SLClass& omega, const SLClass& psi, uint16_t tau, uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  int n = omega.n();
  uint32_t q = F.order();
  require(psi.n() == n, Err::DimensionMismatch, "class sizes differ");
  require(n % 2 == 0 && n >= 4, Err::HypothesisViolated, "even cyclic path needs even n >= 4");
  int m = n / 2;
  require(q > 3 || m >= 3, Err::HypothesisViolated, "small fields need m >= 3");
  require(omega.cyclic() && psi.cyclic(), Err::HypothesisViolated, "both classes must be cyclic");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");

  std::vector<std::pair<std::string, Matrix>> steps;
  auto itW = interleave_form(omega.closure().representative());
  Matrix W1 = itW.form;
  uint16_t detW = itW.conjugator.det();
  steps.push_back({"interleave-W", itW.conjugator});

  auto itQ = interleave_form(psi.closure().representative());
  Matrix J(F, n, n);
  for (int i = 0; i < m; ++i) {
    J.set(i, m + i, 1);
    J.set(m + i, i, 1);
  }
  Matrix Q1 = conjugate(itQ.form, J);
  uint16_t detQ = F.mul(itQ.conjugator.det(), J.det());
  steps.push_back({"interleave-Q", itQ.conjugator * J});

  Matrix C = W1.submatrix(m, 0, m, m);
  Matrix Fm = Q1.submatrix(0, m, m, m);
  uint16_t d0 = F.mul(C.det(), Fm.det());

  for (auto& [lam, M] : lambda_M_candidates(F, m - 1, d0)) {
    auto cf = cyclic_pair_with_product(class_of(C), class_of(Fm), lam, M);
    if (!cf) continue;
    Matrix Rm = find_conjugator(C, cf->first, seed);
    Matrix Sm = find_conjugator(Fm, cf->second, seed);
    Matrix W2 = conjugate(W1, block2(Rm, Rm));
    Matrix Q2 = conjugate(Q1, block2(Sm, Sm));
    uint16_t detW2 = F.mul(detW, F.mul(Rm.det(), Rm.det()));
    uint16_t detQ2 = F.mul(detQ, F.mul(Sm.det(), Sm.det()));

    uint16_t delta = required_det(F, omega.label(), detW2, omega.det_image());
    uint16_t eps = coset_label(F, F.mul(detQ2, F.inv(psi.label())), psi.det_image());
    uint16_t deteps = F.mul(delta, eps);
    uint16_t dCF = F.mul(lam, M.det());

    for (auto& g1 : polys_with_trace_det(F, m, 0, deteps)) {
      for (auto& g2 : polys_with_trace_det(F, m, tau, F.mul(dCF, F.inv(deteps)))) {
        auto z = cyclic_pair_with_product(SimilarityClass(F, {{g1}}), SimilarityClass(F, {{g2}}),
                                          lam, M);
        if (!z) continue;
        Matrix Z1 = z->first;
        std::vector<uint16_t> dg(m, 1);
        dg[0] = delta;
        Matrix X = Matrix::diag(F, dg);
        Matrix Y = X.inverse() * Z1;
        if (Y.det() != eps) continue;
        Matrix W3 = conjugate(W2, expand_block(F, n, m, X));
        Matrix Q3 = conjugate(Q2, expand_block(F, n, m, Y.inverse()));
        steps.push_back({"normalize-W", Rm});
        steps.push_back({"normalize-Q", Sm});
        steps.push_back({"tune-W", X});
        steps.push_back({"tune-Q", Y});
        return make_verified(W3, Q3, tau, "sl/cyclic-even", steps, omega, psi, Group::SL);
      }
    }
  }
  throw Error(Err::ConstructionFailed, "even cyclic path exhausted its candidates");
}

WitnessPair sl_cyclic_odd(const SLClass& omega, const SLClass& psi, uint16_t tau, uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  int n = omega.n();
  uint32_t q = F.order();
  require(psi.n() == n, Err::DimensionMismatch, "class sizes differ");
  require(n % 2 == 1 && n >= 5, Err::HypothesisViolated, "odd cyclic path needs odd n >= 5");
  require(q >= 4, Err::HypothesisViolated, "small fields route through similarity classes");
  require(omega.cyclic() && psi.cyclic(), Err::HypothesisViolated, "both classes must be cyclic");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");
  int m = n / 2;

  std::vector<std::pair<std::string, Matrix>> steps;
  auto itW = interleave_form(omega.closure().representative());
  Matrix W1 = itW.form;
  uint16_t detW = itW.conjugator.det();
  steps.push_back({"interleave-W", itW.conjugator});

  auto itQ = interleave_form(psi.closure().representative());
  Matrix J(F, n, n);  // reverse the three blocks
  for (int i = 0; i < m; ++i) {
    J.set(i, m + 1 + i, 1);
    J.set(m + 1 + i, i, 1);
  }
  J.set(m, m, 1);
  Matrix Q1 = conjugate(itQ.form, J);
  uint16_t detQ = F.mul(itQ.conjugator.det(), J.det());
  steps.push_back({"interleave-Q", itQ.conjugator * J});

  Matrix C = W1.submatrix(m + 1, 0, m, m);
  Matrix Fm = Q1.submatrix(0, m + 1, m, m);
  uint16_t d0 = F.mul(C.det(), Fm.det());

  for (auto& [lam, M] : lambda_M_candidates(F, m - 1, d0)) {
    auto cf = cyclic_pair_with_product(class_of(C), class_of(Fm), lam, M);
    if (!cf) continue;
    Matrix Rm = find_conjugator(C, cf->first, seed);
    Matrix Sm = find_conjugator(Fm, cf->second, seed);
    Matrix blocksW = Matrix::identity(F, n);
    blocksW.paste(0, 0, Rm);
    blocksW.paste(m + 1, m + 1, Rm);
    Matrix blocksQ = Matrix::identity(F, n);
    blocksQ.paste(0, 0, Sm);
    blocksQ.paste(m + 1, m + 1, Sm);
    Matrix W2 = conjugate(W1, blocksW);
    Matrix Q2 = conjugate(Q1, blocksQ);
    uint16_t detW2 = F.mul(detW, F.mul(Rm.det(), Rm.det()));
    uint16_t detQ2 = F.mul(detQ, F.mul(Sm.det(), Sm.det()));

    // fix both labels through the middle one-dimensional block
    uint16_t lc = required_det(F, omega.label(), detW2, omega.det_image());
    uint16_t mc = required_det(F, psi.label(), detQ2, psi.det_image());
    Matrix Pl = Matrix::identity(F, n);
    Pl.set(m, m, lc);
    Matrix Pm = Matrix::identity(F, n);
    Pm.set(m, m, mc);
    Matrix W3 = conjugate(W2, Pl);
    Matrix Q3 = conjugate(Q2, Pm);
    uint16_t beta = W3.at(m, m), gamma = Q3.at(m, m);
    uint16_t dCF = F.mul(lam, M.det());

    for (auto& gx : polys_with_trace_det(F, m, 0, 1)) {
      for (auto& gz : polys_with_trace_det(F, m, F.sub(tau, F.mul(beta, gamma)), dCF)) {
        auto z = cyclic_pair_with_product(SimilarityClass(F, {{gx}}), SimilarityClass(F, {{gz}}),
                                          lam, M);
        if (!z) continue;
        Matrix T = Matrix::identity(F, n);
        T.paste(m + 1, m + 1, z->first);  // det 1, trace 0
        Matrix W4 = conjugate(W3, T);
        steps.push_back({"normalize-W", Rm});
        steps.push_back({"normalize-Q", Sm});
        steps.push_back({"label-W", Pl});
        steps.push_back({"label-Q", Pm});
        steps.push_back({"tune", T});
        return make_verified(W4, Q3, tau, "sl/cyclic-odd", steps, omega, psi, Group::SL);
      }
    }
  }
  throw Error(Err::ConstructionFailed, "odd cyclic path exhausted its candidates");
}

namespace {

Matrix j3_shape(const FieldCtx& F, uint16_t lam) {
  Matrix W(F, 3, 3);
  for (int i = 0; i < 3; ++i) W.set(i, i, lam);
  W.set(0, 1, 1);
  W.set(1, 2, 1);
  return W;
}

uint16_t only_rational_eigenvalue(const SLClass& c) {
  for (auto& [p, e] : c.closure().elementary_divisors())
    require(e >= 2, Err::InternalInconsistency,
            "splitting class carries an irreducible elementary divisor");
  auto ev = c.closure().rational_eigenvalues();
  require(ev.size() == 1, Err::InternalInconsistency, "expected a single rational eigenvalue");
  return ev[0];
}

}  // namespace

WitnessPair sl3_witness(const SLClass& omega, const SLClass& psi, uint16_t tau, uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  require(omega.n() == 3 && psi.n() == 3, Err::Usage, "this path needs n = 3");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");
  if (omega.is_similarity_class() || psi.is_similarity_class())
    return sl_similarity_route(omega, psi, tau, seed);

  // both split: minimal polynomial is the cube of a linear factor
  uint16_t lam = only_rational_eigenvalue(omega), mu = only_rational_eigenvalue(psi);
  require(omega.closure().minimal_poly() == Poly::linear(F, lam).pow(3),
          Err::InternalInconsistency, "unexpected splitting class shape");
  require(psi.closure().minimal_poly() == Poly::linear(F, mu).pow(3), Err::InternalInconsistency,
          "unexpected splitting class shape");

  std::vector<std::pair<std::string, Matrix>> steps;
  auto shaped_rep = [&](const SLClass& cls, uint16_t eig) {
    Matrix form = j3_shape(F, eig);
    Matrix X0 = find_conjugator(cls.closure().representative(), form);
    uint16_t t = required_det(F, cls.label(), X0.det(), cls.det_image());
    return conjugate(form, Matrix::diag(F, {t, 1, 1}));
  };
  Matrix W1 = shaped_rep(omega, lam);
  Matrix Q1 = shaped_rep(psi, mu);
  require(std::get<SLClass>(class_of(W1, Group::SL)) == omega, Err::InternalInconsistency,
          "label fix failed on Omega");
  require(std::get<SLClass>(class_of(Q1, Group::SL)) == psi, Err::InternalInconsistency,
          "label fix failed on Psi");

  Matrix A = W1.submatrix(0, 0, 2, 2), At = Q1.submatrix(0, 0, 2, 2);
  uint16_t target2 = F.sub(tau, F.mul(lam, mu));
  auto r2 = witness_2x2(class_of(A), class_of(At), target2);
  require(std::holds_alternative<WitnessPair>(r2), Err::InternalInconsistency,
          "reducible 2x2 pair cannot exclude traces");
  auto& w2 = std::get<WitnessPair>(r2);
  Matrix H = find_conjugator(w2.Q, At);
  Matrix A2 = conjugate(w2.W, H);
  Matrix X = find_conjugator(A, A2);
  Matrix G(F, 3, 3);
  G.paste(0, 0, X);
  G.set(2, 2, F.inv(X.det()));
  Matrix W2 = conjugate(W1, G);
  steps.push_back({"corner-tune", G});
  return make_verified(W2, Q1, tau, "sl/three", steps, omega, psi, Group::SL);
}

namespace {

enum class Sl43Type { IrreducibleSquare, UnipotentSquare };

Sl43Type sl43_type(const SLClass& c) {
  auto eld = c.closure().elementary_divisors();
  for (auto& [p, e] : eld)
    require(e >= 2, Err::InternalInconsistency,
            "splitting class carries an irreducible elementary divisor");
  if (eld.size() == 1 && eld[0].first.degree() == 2) return Sl43Type::IrreducibleSquare;
  for (auto& [p, e] : eld)
    require(p.degree() == 1, Err::InternalInconsistency, "unexpected SL(4,3) class shape");
  return Sl43Type::UnipotentSquare;
}

// block-triangular representative with indecomposable 2x2 diagonal blocks
Matrix sl43_shape(const SLClass& c, Sl43Type type) {
  const FieldCtx& F = c.ctx();
  auto eld = c.closure().elementary_divisors();
  Matrix form(F, 4, 4);
  if (type == Sl43Type::IrreducibleSquare) {
    Matrix Cp = Matrix::companion(eld[0].first);
    form.paste(0, 0, Cp);
    form.paste(2, 2, Cp);
    form.set(1, 2, 1);  // hypercompanion coupling
  } else if (eld.size() == 1) {  // (x - l)^4
    uint16_t l = F.neg(eld[0].first.coeff(0));
    for (int i = 0; i < 4; ++i) form.set(i, i, l);
    form.set(0, 1, 1);
    form.set(1, 2, 1);
    form.set(2, 3, 1);
  } else {  // (x - l)^2, (x - mu)^2
    uint16_t l = F.neg(eld[0].first.coeff(0));
    uint16_t mu = F.neg(eld[1].first.coeff(0));
    form.set(0, 0, l);
    form.set(0, 1, 1);
    form.set(1, 1, l);
    form.set(2, 2, mu);
    form.set(2, 3, 1);
    form.set(3, 3, mu);
  }
  Matrix X0 = find_conjugator(c.closure().representative(), form);
  uint16_t t = required_det(F, c.label(), X0.det(), c.det_image());
  return conjugate(form, Matrix::diag(F, {t, 1, 1, 1}));
}

std::vector<Matrix> sl2_elements(const FieldCtx& F) {
  std::vector<Matrix> out;
  uint32_t q = F.order();
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b)
      for (uint32_t c = 0; c < q; ++c)
        for (uint32_t d = 0; d < q; ++d) {
          Matrix X(F, 2, 2);
          X.set(0, 0, uint16_t(a));
          X.set(0, 1, uint16_t(b));
          X.set(1, 0, uint16_t(c));
          X.set(1, 1, uint16_t(d));
          if (X.det() == 1) out.push_back(X);
        }
  return out;
}

}  // namespace

WitnessPair sl43_witness(const SLClass& omega, const SLClass& psi, uint16_t tau, uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  require(F.order() == 3, Err::Usage, "this path is specific to GF(3)");
  require(omega.n() == 4 && psi.n() == 4, Err::Usage, "this path is specific to n = 4");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");
  if (omega.is_similarity_class() || psi.is_similarity_class())
    return sl_similarity_route(omega, psi, tau, seed);

  Sl43Type tw = sl43_type(omega), tq = sl43_type(psi);
  if (tw == Sl43Type::UnipotentSquare && tq == Sl43Type::IrreducibleSquare)
    return swap_sides(sl43_witness(psi, omega, tau, seed));

  Matrix W1 = sl43_shape(omega, tw);
  Matrix Q1 = sl43_shape(psi, tq);
  require(std::get<SLClass>(class_of(W1, Group::SL)) == omega, Err::InternalInconsistency,
          "label fix failed on Omega");
  require(std::get<SLClass>(class_of(Q1, Group::SL)) == psi, Err::InternalInconsistency,
          "label fix failed on Psi");
  Matrix A = W1.submatrix(0, 0, 2, 2), Dw = W1.submatrix(2, 2, 2, 2);
  Matrix R = Q1.submatrix(0, 0, 2, 2), T = Q1.submatrix(2, 2, 2, 2);
  std::vector<std::pair<std::string, Matrix>> steps;

  if (tw == Sl43Type::IrreducibleSquare && tq == Sl43Type::IrreducibleSquare) {
    uint16_t tau1 = F.sub(tau, (Dw * T).trace());
    for (auto& X : sl2_elements(F)) {
      if ((conjugate(A, X) * R).trace() != tau1) continue;
      Matrix G = Matrix::identity(F, 4);
      G.paste(0, 0, X);
      Matrix W2 = conjugate(W1, G);
      steps.push_back({"corner-tune", G});
      return make_verified(W2, Q1, tau, "sl/four-three/irreducible-blocks", steps, omega, psi,
                           Group::SL);
    }
    throw Error(Err::ConstructionFailed, "SL(2,3) sweep found no matching corner trace");
  }

  if (tw == Sl43Type::UnipotentSquare && tq == Sl43Type::UnipotentSquare) {
    uint16_t c0 = (Dw * T).trace();  // triangular blocks: stable under compensation
    uint16_t tau1 = F.sub(tau, c0);
    auto r2 = witness_2x2(class_of(A), class_of(R), tau1);
    require(std::holds_alternative<WitnessPair>(r2), Err::InternalInconsistency,
            "reducible 2x2 pair cannot exclude traces");
    auto& w2 = std::get<WitnessPair>(r2);
    Matrix H = find_conjugator(w2.Q, R);
    Matrix A2 = conjugate(w2.W, H);
    Matrix X = find_conjugator(A, A2);
    Matrix Y = Matrix::diag(F, {1, X.det()});
    Matrix G(F, 4, 4);
    G.paste(0, 0, X);
    G.paste(2, 2, Y);
    require(G.det() == 1, Err::InternalInconsistency, "compensated conjugator must be in SL");
    Matrix W2 = conjugate(W1, G);
    steps.push_back({"corner-tune", G});
    return make_verified(W2, Q1, tau, "sl/four-three/unipotent-squares", steps, omega, psi,
                         Group::SL);
  }

  // mixed: Omega of irreducible-square type, Psi with unipotent square
  auto sl2 = sl2_elements(F);
  for (auto& X : sl2) {
    uint16_t t1 = (conjugate(A, X) * R).trace();
    for (auto& Y : sl2) {
      if (F.add(t1, (conjugate(Dw, Y) * T).trace()) != tau) continue;
      Matrix G(F, 4, 4);
      G.paste(0, 0, X);
      G.paste(2, 2, Y);
      Matrix W2 = conjugate(W1, G);
      steps.push_back({"corner-tune", G});
      return make_verified(W2, Q1, tau, "sl/four-three/mixed", steps, omega, psi, Group::SL);
    }
  }
  throw Error(Err::ConstructionFailed, "mixed-case SL(2,3) sweep exhausted");
}

WitnessPair sl_general_witness(const SLClass& omega, const SLClass& psi, uint16_t tau,
                               uint64_t seed) {
  const FieldCtx& F = omega.ctx();
  int n = omega.n();
  require(psi.n() == n && n >= 4, Err::Usage, "general SL path needs n >= 4");
  require(!omega.scalar() && !psi.scalar(), Err::ScalarClass, "scalar class");
  require(!psi.cyclic(), Err::PreconditionViolated, "Psi must be noncyclic here");
  require(!omega.is_similarity_class() && !psi.is_similarity_class(), Err::PreconditionViolated,
          "similarity classes route through theorem 1");

  // cyclic direct summand of Psi of dimension 2..n/2: one prime-power
  // elementary divisor per distinct irreducible
  auto eld = psi.closure().elementary_divisors();
  std::vector<size_t> chosen;
  {
    std::vector<size_t> best;
    std::function<void(size_t, std::vector<size_t>&, int)> rec =
        [&](size_t i, std::vector<size_t>& cur, int dim) {
          if (!best.empty()) return;
          if (dim >= 2 && dim <= n / 2) {
            best = cur;
            return;
          }
          if (i == eld.size() || dim > n / 2) return;
          bool fresh = true;
          for (size_t j : cur)
            if (eld[j].first == eld[i].first) fresh = false;
          if (fresh) {
            cur.push_back(i);
            rec(i + 1, cur, dim + eld[i].first.degree() * eld[i].second);
            cur.pop_back();
          }
          rec(i + 1, cur, dim);
        };
    std::vector<size_t> cur;
    rec(0, cur, 0);
    if (best.empty())
      throw Error(Err::ConstructionFailed, "no cyclic summand of dimension 2..n/2 in Psi");
    chosen = best;
  }
  Poly g1 = Poly::constant(F, 1);
  for (size_t i : chosen) g1 = g1 * eld[i].first.pow(uint32_t(eld[i].second));
  int r = g1.degree();
  std::vector<std::pair<Poly, int>> rest;
  for (size_t i = 0; i < eld.size(); ++i)
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) rest.push_back(eld[i]);
  std::map<std::vector<uint32_t>, std::pair<Poly, std::vector<int>>> by_irr;
  for (auto& [p, e] : rest) {
    auto& slot = by_irr.emplace(p.key(), std::make_pair(p, std::vector<int>{})).first->second;
    slot.second.push_back(e);
  }
  int s2 = 0;
  for (auto& [k, pe] : by_irr) {
    std::sort(pe.second.rbegin(), pe.second.rend());
    s2 = std::max(s2, int(pe.second.size()));
  }
  InvariantFactors psi2;
  for (int pos = s2 - 1; pos >= 0; --pos) {
    Poly f = Poly::constant(F, 1);
    for (auto& [k, pe] : by_irr)
      if (pos < int(pe.second.size())) f = f * pe.first.pow(uint32_t(pe.second[pos]));
    psi2.chain.push_back(f);
  }

  Matrix R = Matrix::companion(g1);
  std::vector<Matrix> sblocks;
  for (auto& f : psi2.chain) sblocks.push_back(Matrix::companion(f));
  Matrix S = Matrix::direct_sum(sblocks);
  Matrix Q0(F, n, n);
  Q0.paste(0, 0, R);
  Q0.paste(r, r, S);
  require(class_of(Q0) == psi.closure(), Err::InternalInconsistency,
          "summand split changed the class");
  uint16_t label0 = std::get<SLClass>(class_of(Q0, Group::SL)).label();
  std::vector<uint16_t> dq(n - r, 1);
  dq[0] = F.mul(psi.label(), F.inv(label0));
  Matrix GS = Matrix::identity(F, n);
  GS.paste(r, r, Matrix::diag(F, dq));
  Matrix Q1 = conjugate(Q0, GS);
  require(std::get<SLClass>(class_of(Q1, Group::SL)) == psi, Err::InternalInconsistency,
          "label fix failed on Psi");
  Matrix S1 = Q1.submatrix(r, r, n - r, n - r);

  Matrix W0 = omega.closure().representative();
  int mr = minimal_rank(W0);
  if (mr < r)
    throw Error(Err::MrTooSmall, "minimal rank " + std::to_string(mr) +
                                     " below summand dimension " + std::to_string(r) +
                                     " for class " + omega.text());

  // cyclic corner with a multiplicity-one rational eigenvalue
  uint16_t a_eig = 0;
  Poly h(F);
  {
    bool found = false;
    for (uint32_t a = 0; a < F.order() && !found; ++a)
      for (auto& hc : monic_polys(F, r - 1)) {
        if (hc.eval(uint16_t(a)) == 0) continue;
        a_eig = uint16_t(a);
        h = hc;
        found = true;
        break;
      }
    require(found, Err::InternalInconsistency, "no separated corner polynomial");
  }
  Poly gstar = Poly::linear(F, a_eig) * h;
  Matrix Astar = Matrix::companion(gstar);

  Matrix Tplant = sourour_embed(W0, Astar, seed);
  Matrix W2 = conjugate(W0, Tplant);
  uint16_t detW = Tplant.det();
  Matrix D2 = W2.submatrix(r, r, n - r, n - r);
  uint16_t c0 = (D2 * S1).trace();
  uint16_t tau1 = F.sub(tau, c0);

  SimilarityClass clsA = class_of(Astar), clsR = class_of(R);
  Matrix A2(F, 2, 2);
  if (r >= 3) {
    WitnessPair inner = theorem1_witness(clsA, clsR, tau1, seed);
    Matrix H = find_conjugator(inner.Q, R);
    A2 = conjugate(inner.W, H);
  } else {
    auto inner = witness_2x2(clsA, clsR, tau1);
    require(std::holds_alternative<WitnessPair>(inner), Err::InternalInconsistency,
            "corner class was chosen non-primary");
    Matrix H = find_conjugator(std::get<WitnessPair>(inner).Q, R);
    A2 = conjugate(std::get<WitnessPair>(inner).W, H);
  }
  Matrix Y = find_conjugator(Astar, A2);

  // centralizer determinant trick: C = 1 + (c-1) h(A*)/h(a) has det c and
  // commutes with A*, pushing det(X) into the required label coset
  uint16_t d_req = required_det(F, omega.label(), detW, omega.det_image());
  uint16_t cval = F.mul(d_req, F.inv(Y.det()));
  Matrix Ccorr = Matrix::identity(F, r) +
                 eval_poly(h, Astar).scalar_mul(F.mul(F.sub(cval, 1), F.inv(h.eval(a_eig))));
  require(Ccorr.det() == cval, Err::InternalInconsistency, "centralizer correction determinant");
  require(Ccorr * Astar == Astar * Ccorr, Err::InternalInconsistency,
          "centralizer correction does not commute");
  Matrix X = Ccorr * Y;
  Matrix GX = Matrix::identity(F, n);
  GX.paste(0, 0, X);
  Matrix W3 = conjugate(W2, GX);
  std::vector<std::pair<std::string, Matrix>> steps = {
      {"plant", Tplant}, {"psi-label-fix", GS}, {"corner-tune", GX}};
  return make_verified(W3, Q1, tau, "sl/general", steps, omega, psi, Group::SL);
}

// ---------- dispatcher ----------

WitnessResult witness(const AnyClass& omega, const AnyClass& psi, uint16_t tau, Group group,
                      uint64_t seed) {
  const SimilarityClass& co = closure_of(omega);
  const SimilarityClass& cp = closure_of(psi);
  require(co.ctx().same_field(cp.ctx()), Err::MixedFields, "classes over different fields");
  require(co.n() == cp.n(), Err::DimensionMismatch, "class sizes differ");
  require(!co.scalar() && !cp.scalar(), Err::ScalarClass, "scalar class");
  int n = co.n();

  if (group != Group::SL) {
    require(std::holds_alternative<SimilarityClass>(omega) &&
                std::holds_alternative<SimilarityClass>(psi),
            Err::Usage, "similarity witness needs similarity class handles");
    const auto& om = std::get<SimilarityClass>(omega);
    const auto& ps = std::get<SimilarityClass>(psi);
    if (n == 2) {
      if (!om.irreducible()) return witness_2x2(om, ps, tau);
      if (!ps.irreducible()) {
        auto r = witness_2x2(ps, om, tau);
        if (std::holds_alternative<WitnessPair>(r))
          return swap_sides(std::get<WitnessPair>(std::move(r)));
        return r;
      }
      throw Error(Err::UnsupportedCase, "both 2x2 classes irreducible");
    }
    require(n >= 3, Err::UnsupportedCase, "witness needs n >= 2");
    return theorem1_witness(om, ps, tau, seed);
  }

  require(std::holds_alternative<SLClass>(omega) && std::holds_alternative<SLClass>(psi),
          Err::Usage, "SL witness needs SL class handles");
  require(n >= 3, Err::UnsupportedCase, "SL witness needs n >= 3");
  const auto& om = std::get<SLClass>(omega);
  const auto& ps = std::get<SLClass>(psi);
  if (om.is_similarity_class() || ps.is_similarity_class())
    return sl_similarity_route(om, ps, tau, seed);
  if (n == 3) return sl3_witness(om, ps, tau, seed);
  if (n == 4 && om.ctx().order() == 3) return sl43_witness(om, ps, tau, seed);
  if (om.cyclic() && ps.cyclic()) {
    if (n % 2 == 0) return sl_cyclic_even(om, ps, tau, seed);
    return sl_cyclic_odd(om, ps, tau, seed);
  }
  if (ps.cyclic()) return swap_sides(sl_general_witness(ps, om, tau, seed));
  return sl_general_witness(om, ps, tau, seed);
}

}  // namespace traceprod
