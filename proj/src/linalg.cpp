#include "traceprod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace traceprod {

Poly InvariantFactors::characteristic() const {
  Poly p = Poly::constant(chain[0].ctx(), 1);
  for (auto& f : chain) p = p * f;
  return p;
}

int InvariantFactors::total_degree() const {
  int d = 0;
  for (auto& f : chain) d += f.degree();
  return d;
}

namespace {

using PolyMat = std::vector<std::vector<Poly>>;

// Smith reduction over K[x]; returns monic nonunit diagonal entries.
std::vector<Poly> smith_diagonal(PolyMat M, const FieldCtx& F) {
  int n = int(M.size());
  std::vector<Poly> diag;
  for (int t = 0; t < n; ++t) {
    for (;;) {
      // minimal-degree nonzero pivot into (t,t)
      int bi = -1, bj = -1, bd = 0;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j)
          if (!M[i][j].is_zero() && (bi < 0 || M[i][j].degree() < bd)) {
            bi = i;
            bj = j;
            bd = M[i][j].degree();
          }
      if (bi < 0) {
        for (int r = t; r < n; ++r) diag.push_back(Poly(F));
        return diag;
      }
      std::swap(M[bi], M[t]);
      for (int i = 0; i < n; ++i) std::swap(M[i][bj], M[i][t]);

      bool again = false;
      for (int i = t + 1; i < n && !again; ++i) {
        if (M[i][t].is_zero()) continue;
        auto [q, r] = M[i][t].divmod(M[t][t]);
        for (int j = t; j < n; ++j) M[i][j] = M[i][j] - q * M[t][j];
        if (!M[i][t].is_zero()) again = true;  // smaller-degree remainder becomes pivot
      }
      if (again) continue;
      for (int j = t + 1; j < n && !again; ++j) {
        if (M[t][j].is_zero()) continue;
        auto [q, r] = M[t][j].divmod(M[t][t]);
        for (int i = t; i < n; ++i) M[i][j] = M[i][j] - M[i][t] * q;
        if (!M[t][j].is_zero()) again = true;
      }
      if (again) continue;
      // pivot must divide the rest of the block
      bool fixed = false;
      for (int i = t + 1; i < n && !fixed; ++i)
        for (int j = t + 1; j < n && !fixed; ++j)
          if (!M[t][t].divides(M[i][j])) {
            for (int jj = t; jj < n; ++jj) M[t][jj] = M[t][jj] + M[i][jj];
            fixed = true;
          }
      if (!fixed) break;
    }
    diag.push_back(M[t][t].monic());
  }
  return diag;
}

}  // namespace

InvariantFactors invariant_factors(const Matrix& A) {
  if (!A.square()) throw Error(Err::DimensionMismatch, "invariant_factors of non-square");
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  PolyMat M(n, std::vector<Poly>(n, Poly(F)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<uint16_t> c;
      c.push_back(F.neg(A.at(i, j)));
      if (i == j) c.push_back(1);
      M[i][j] = Poly(F, std::move(c));
    }
  auto diag = smith_diagonal(std::move(M), F);
  InvariantFactors out;
  for (auto& d : diag)
    if (d.degree() >= 1) out.chain.push_back(d);
  if (out.total_degree() != n) throw Error(Err::InternalInconsistency, "smith degree sum mismatch");
  return out;
}

bool is_similar(const Matrix& A, const Matrix& B) {
  if (!A.ctx().same_field(B.ctx()) || A.rows() != B.rows() || !A.square() || !B.square())
    return false;
  return invariant_factors(A) == invariant_factors(B);
}

Matrix conjugate(const Matrix& A, const Matrix& X) { return A.conjugate_by(X); }

std::optional<std::vector<uint16_t>> cyclic_vector(const Matrix& A) {
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  if (minpoly(A).degree() < n) return std::nullopt;
  auto krylov_rank = [&](const std::vector<uint16_t>& v) {
    std::vector<std::vector<uint16_t>> rows;
    std::vector<uint16_t> w = v;
    for (int i = 0; i < n; ++i) {
      rows.push_back(w);
      w = vec_mat(w, A);
    }
    Matrix K(F, n, n);
    for (int i = 0; i < n; ++i) K.set_row(i, rows[i]);
    return K.rank();
  };
  // standard vectors, then pair sums, then everything
  for (int i = 0; i < n; ++i) {
    std::vector<uint16_t> v(n, 0);
    v[i] = 1;
    if (krylov_rank(v) == n) return v;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (uint32_t c = 1; c < F.order(); ++c) {
        std::vector<uint16_t> v(n, 0);
        v[i] = 1;
        v[j] = uint16_t(c);
        if (krylov_rank(v) == n) return v;
      }
  uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= F.order();
  for (uint64_t idx = 1; idx < total; ++idx) {
    std::vector<uint16_t> v(n);
    uint64_t t = idx;
    for (int i = 0; i < n; ++i) {
      v[i] = uint16_t(t % F.order());
      t /= F.order();
    }
    if (krylov_rank(v) == n) return v;
  }
  return std::nullopt;
}

std::vector<int> rref(std::vector<std::vector<uint16_t>>& rows, const FieldCtx& F) {
  std::vector<int> pivots;
  if (rows.empty()) return pivots;
  int m = int(rows.size()), n = int(rows[0].size());
  int r = 0;
  for (int col = 0; col < n && r < m; ++col) {
    int piv = -1;
    for (int i = r; i < m; ++i)
      if (rows[i][col]) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[r]);
    uint16_t inv = F.inv(rows[r][col]);
    for (int j = 0; j < n; ++j) rows[r][j] = F.mul(rows[r][j], inv);
    for (int i = 0; i < m; ++i) {
      if (i == r || !rows[i][col]) continue;
      uint16_t f = rows[i][col];
      for (int j = 0; j < n; ++j) rows[i][j] = F.sub(rows[i][j], F.mul(f, rows[r][j]));
    }
    pivots.push_back(col);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

std::vector<std::vector<uint16_t>> nullspace(std::vector<std::vector<uint16_t>> eqs, int unknowns,
                                             const FieldCtx& F) {
  auto pivots = rref(eqs, F);
  std::vector<bool> is_pivot(unknowns, false);
  for (int p : pivots) is_pivot[p] = true;
  std::vector<std::vector<uint16_t>> basis;
  for (int freec = 0; freec < unknowns; ++freec) {
    if (is_pivot[freec]) continue;
    std::vector<uint16_t> v(unknowns, 0);
    v[freec] = 1;
    for (size_t r = 0; r < eqs.size(); ++r) v[pivots[r]] = F.neg(eqs[r][freec]);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<uint16_t>> solve_linear(std::vector<std::vector<uint16_t>> eqs,
                                                  std::vector<uint16_t> rhs, const FieldCtx& F) {
  int unknowns = eqs.empty() ? 0 : int(eqs[0].size());
  for (size_t i = 0; i < eqs.size(); ++i) eqs[i].push_back(rhs[i]);
  auto pivots = rref(eqs, F);
  for (size_t r = 0; r < eqs.size(); ++r)
    if (pivots[r] == unknowns) return std::nullopt;  // 0 = nonzero row
  std::vector<uint16_t> x(unknowns, 0);
  for (size_t r = 0; r < eqs.size(); ++r) x[pivots[r]] = eqs[r][unknowns];
  return x;
}

std::vector<Matrix> centralizer_basis(const Matrix& A) {
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  // equations over unknowns x_{ij}: (A X - X A)_{ij} = 0
  std::vector<std::vector<uint16_t>> eqs;
  eqs.reserve(size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<uint16_t> row(size_t(n) * n, 0);
      for (int k = 0; k < n; ++k) {
        row[size_t(k) * n + j] = F.add(row[size_t(k) * n + j], A.at(i, k));
        row[size_t(i) * n + k] = F.sub(row[size_t(i) * n + k], A.at(k, j));
      }
      eqs.push_back(std::move(row));
    }
  auto basis = nullspace(std::move(eqs), n * n, F);
  std::vector<Matrix> out;
  for (auto& v : basis) {
    Matrix m(F, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.set(i, j, v[size_t(i) * n + j]);
    out.push_back(std::move(m));
  }
  return out;
}

bool DetImage::contains(uint16_t v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

std::vector<uint16_t> subgroup_closure(const FieldCtx& F, std::vector<uint16_t> gens) {
  std::set<uint16_t> s = {1};
  for (uint16_t g : gens) {
    if (!g) continue;
    std::vector<uint16_t> cur(s.begin(), s.end());
    for (uint16_t base : cur) {
      uint16_t x = F.mul(base, g);
      while (!s.count(x)) {
        s.insert(x);
        x = F.mul(x, g);
      }
    }
  }
  return std::vector<uint16_t>(s.begin(), s.end());
}

DetImage centralizer_det_image(const Matrix& A, uint64_t budget, uint64_t seed) {
  const FieldCtx& F = A.ctx();
  uint32_t q = F.order();
  DetImage out;
  if (A.is_scalar()) {  // centralizer is everything; det is onto K*
    for (uint32_t v = 1; v < q; ++v) out.members.push_back(uint16_t(v));
    return out;
  }
  auto basis = centralizer_basis(A);
  int d = int(basis.size());
  int n = A.rows();
  double logsz = d * std::log2(double(q));
  std::set<uint16_t> dets;
  auto assemble = [&](const std::vector<uint16_t>& coef) {
    Matrix X(F, n, n);
    for (int t = 0; t < d; ++t) {
      if (!coef[t]) continue;
      X = X + basis[t].scalar_mul(coef[t]);
    }
    return X;
  };
  if (logsz <= std::log2(double(budget))) {
    std::vector<uint16_t> coef(d, 0);
    for (;;) {
      int p = 0;
      while (p < d && coef[p] == q - 1) coef[p++] = 0;
      if (p == d) break;
      ++coef[p];
      uint16_t dv = assemble(coef).det();
      if (dv) {
        dets.insert(dv);
        if (dets.size() == q - 1) break;
      }
    }
    out.certified = true;
  } else {
    SplitMix64 rng(seed);
    std::vector<uint16_t> closure = {1};
    int stable = 0;
    while (stable < 4096 && closure.size() < q - 1) {
      std::vector<uint16_t> coef(d);
      for (int t = 0; t < d; ++t) coef[t] = uint16_t(rng.below(q));
      uint16_t dv = assemble(coef).det();
      if (dv) {
        std::vector<uint16_t> gens(closure.begin(), closure.end());
        gens.push_back(dv);
        auto next = subgroup_closure(F, gens);
        if (next.size() > closure.size()) {
          closure = next;
          stable = 0;
          continue;
        }
      }
      ++stable;
    }
    dets.insert(closure.begin(), closure.end());
    out.certified = false;
  }
  out.members.assign(dets.begin(), dets.end());
  return out;
}

Matrix find_conjugator(const Matrix& A, const Matrix& B, uint64_t seed) {
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  // A X = X B
  std::vector<std::vector<uint16_t>> eqs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<uint16_t> row(size_t(n) * n, 0);
      for (int k = 0; k < n; ++k) {
        row[size_t(k) * n + j] = F.add(row[size_t(k) * n + j], A.at(i, k));
        row[size_t(i) * n + k] = F.sub(row[size_t(i) * n + k], B.at(k, j));
      }
      eqs.push_back(std::move(row));
    }
  auto basis = nullspace(std::move(eqs), n * n, F);
  int d = int(basis.size());
  auto assemble = [&](const std::vector<uint16_t>& coef) {
    Matrix X(F, n, n);
    for (int t = 0; t < d; ++t) {
      if (!coef[t]) continue;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          X.set(i, j, F.add(X.at(i, j), F.mul(coef[t], basis[t][size_t(i) * n + j])));
    }
    return X;
  };
  uint32_t q = F.order();
  // deterministic odometer prefix, then seeded random draws
  uint64_t cap = 1;
  for (int t = 0; t < d && cap <= (1 << 16); ++t) cap *= q;
  for (uint64_t idx = 1; idx < std::min<uint64_t>(cap, 1 << 16); ++idx) {
    std::vector<uint16_t> coef(d, 0);
    uint64_t v = idx;
    for (int t = 0; t < d && v; ++t) {
      coef[t] = uint16_t(v % q);
      v /= q;
    }
    Matrix X = assemble(coef);
    if (X.det()) return X;
  }
  SplitMix64 rng(seed);
  for (int tries = 0; tries < 200000; ++tries) {
    std::vector<uint16_t> coef(d);
    for (int t = 0; t < d; ++t) coef[t] = uint16_t(rng.below(q));
    Matrix X = assemble(coef);
    if (X.det()) return X;
  }
  throw Error(Err::InternalInconsistency, "no invertible conjugator found");
}

}  // namespace traceprod
