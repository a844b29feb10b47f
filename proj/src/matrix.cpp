#include "traceprod/matrix.hpp"

#include <algorithm>
#include <sstream>

namespace traceprod {

Matrix Matrix::identity(const FieldCtx& F, int n) {
  Matrix m(F, n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

Matrix Matrix::scalar(const FieldCtx& F, int n, uint16_t v) {
  Matrix m(F, n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, v);
  return m;
}

Matrix Matrix::companion(const Poly& f) {
  if (!f.is_monic() || f.degree() < 1)
    throw Error(Err::Usage, "companion needs a monic polynomial of degree >= 1");
  const FieldCtx& F = f.ctx();
  int d = f.degree();
  Matrix m(F, d, d);
  for (int i = 0; i + 1 < d; ++i) m.set(i, i + 1, 1);
  for (int j = 0; j < d; ++j) m.set(d - 1, j, F.neg(f.coeff(j)));
  return m;
}

Matrix Matrix::diag(const FieldCtx& F, const std::vector<uint16_t>& d) {
  Matrix m(F, int(d.size()), int(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m.set(int(i), int(i), d[i]);
  return m;
}

Matrix Matrix::direct_sum(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) throw Error(Err::Usage, "direct_sum of nothing");
  int n = 0;
  for (auto& b : blocks) n += b.rows();
  Matrix m(blocks[0].ctx(), n, n);
  int off = 0;
  for (auto& b : blocks) {
    m.paste(off, off, b);
    off += b.rows();
  }
  return m;
}

Matrix Matrix::from_ints(const FieldCtx& F, const std::vector<std::vector<int64_t>>& rows) {
  Matrix m(F, int(rows.size()), rows.empty() ? 0 : int(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m.set(int(i), int(j), F.from_int(rows[i][j]));
  return m;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (r_ != o.r_ || c_ != o.c_) throw Error(Err::DimensionMismatch, "add");
  Matrix m(*f_, r_, c_);
  for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = f_->add(e_[i], o.e_[i]);
  return m;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (r_ != o.r_ || c_ != o.c_) throw Error(Err::DimensionMismatch, "sub");
  Matrix m(*f_, r_, c_);
  for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = f_->sub(e_[i], o.e_[i]);
  return m;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (c_ != o.r_) throw Error(Err::DimensionMismatch, "mul");
  Matrix m(*f_, r_, o.c_);
  for (int i = 0; i < r_; ++i)
    for (int k = 0; k < c_; ++k) {
      uint16_t a = at(i, k);
      if (!a) continue;
      const uint16_t* mr = f_->mul_row(a);
      for (int j = 0; j < o.c_; ++j)
        m.e_[size_t(i) * o.c_ + j] = f_->add(m.e_[size_t(i) * o.c_ + j], mr[o.at(k, j)]);
    }
  return m;
}

Matrix Matrix::scalar_mul(uint16_t s) const {
  Matrix m(*f_, r_, c_);
  const uint16_t* mr = f_->mul_row(s);
  for (size_t i = 0; i < e_.size(); ++i) m.e_[i] = mr[e_[i]];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix m(*f_, c_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) m.set(j, i, at(i, j));
  return m;
}

Matrix Matrix::pow(uint64_t e) const {
  if (!square()) throw Error(Err::DimensionMismatch, "pow of non-square");
  Matrix r = identity(*f_, r_), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

uint16_t Matrix::trace() const {
  if (!square()) throw Error(Err::DimensionMismatch, "trace of non-square");
  uint16_t t = 0;
  for (int i = 0; i < r_; ++i) t = f_->add(t, at(i, i));
  return t;
}

uint16_t Matrix::det() const {
  if (!square()) throw Error(Err::DimensionMismatch, "det of non-square");
  Matrix w = *this;
  uint16_t d = 1;
  for (int col = 0; col < c_; ++col) {
    int piv = -1;
    for (int i = col; i < r_; ++i)
      if (w.at(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) return 0;
    if (piv != col) {
      for (int j = 0; j < c_; ++j) std::swap(w.e_[size_t(piv) * c_ + j], w.e_[size_t(col) * c_ + j]);
      d = f_->neg(d);
    }
    uint16_t pv = w.at(col, col);
    d = f_->mul(d, pv);
    uint16_t pinv = f_->inv(pv);
    for (int i = col + 1; i < r_; ++i) {
      uint16_t factor = f_->mul(w.at(i, col), pinv);
      if (!factor) continue;
      for (int j = col; j < c_; ++j)
        w.set(i, j, f_->sub(w.at(i, j), f_->mul(factor, w.at(col, j))));
    }
  }
  return d;
}

int Matrix::rank() const {
  Matrix w = *this;
  int rank = 0;
  for (int col = 0; col < c_ && rank < r_; ++col) {
    int piv = -1;
    for (int i = rank; i < r_; ++i)
      if (w.at(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = 0; j < c_; ++j) std::swap(w.e_[size_t(piv) * c_ + j], w.e_[size_t(rank) * c_ + j]);
    uint16_t pinv = f_->inv(w.at(rank, col));
    for (int i = rank + 1; i < r_; ++i) {
      uint16_t factor = f_->mul(w.at(i, col), pinv);
      if (!factor) continue;
      for (int j = col; j < c_; ++j)
        w.set(i, j, f_->sub(w.at(i, j), f_->mul(factor, w.at(rank, j))));
    }
    ++rank;
  }
  return rank;
}

std::optional<Matrix> Matrix::inverse_opt() const {
  if (!square()) throw Error(Err::DimensionMismatch, "inverse of non-square");
  int n = r_;
  Matrix w = *this, inv = identity(*f_, n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (w.at(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) return std::nullopt;
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(w.e_[size_t(piv) * n + j], w.e_[size_t(col) * n + j]);
        std::swap(inv.e_[size_t(piv) * n + j], inv.e_[size_t(col) * n + j]);
      }
    uint16_t pinv = f_->inv(w.at(col, col));
    for (int j = 0; j < n; ++j) {
      w.set(col, j, f_->mul(w.at(col, j), pinv));
      inv.set(col, j, f_->mul(inv.at(col, j), pinv));
    }
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      uint16_t factor = w.at(i, col);
      if (!factor) continue;
      for (int j = 0; j < n; ++j) {
        w.set(i, j, f_->sub(w.at(i, j), f_->mul(factor, w.at(col, j))));
        inv.set(i, j, f_->sub(inv.at(i, j), f_->mul(factor, inv.at(col, j))));
      }
    }
  }
  return inv;
}

Matrix Matrix::inverse() const {
  auto r = inverse_opt();
  if (!r) throw Error(Err::Singular, "matrix not invertible");
  return *r;
}

bool Matrix::is_zero() const {
  for (auto v : e_)
    if (v) return false;
  return true;
}

bool Matrix::is_identity() const {
  if (!square()) return false;
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j)
      if (at(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

bool Matrix::is_scalar() const {
  if (!square()) return false;
  uint16_t d = at(0, 0);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j)
      if (at(i, j) != (i == j ? d : 0)) return false;
  return true;
}

Matrix Matrix::submatrix(int r0, int c0, int h, int w) const {
  Matrix m(*f_, h, w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) m.set(i, j, at(r0 + i, c0 + j));
  return m;
}

void Matrix::paste(int r0, int c0, const Matrix& b) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) set(r0 + i, c0 + j, b.at(i, j));
}

std::vector<uint16_t> Matrix::row(int i) const {
  return std::vector<uint16_t>(e_.begin() + size_t(i) * c_, e_.begin() + size_t(i + 1) * c_);
}

void Matrix::set_row(int i, const std::vector<uint16_t>& v) {
  std::copy(v.begin(), v.end(), e_.begin() + size_t(i) * c_);
}

Matrix Matrix::conjugate_by(const Matrix& X) const {
  auto xi = X.inverse_opt();
  if (!xi) throw Error(Err::Singular, "conjugator not invertible");
  return (*xi) * (*this) * X;
}

std::string Matrix::encode() const {
  std::string s;
  s.reserve(e_.size() + 2);
  s.push_back(char(r_));
  s.push_back(char(c_));
  for (auto v : e_) {
    s.push_back(char(v & 0xff));
    if (f_->order() > 256) s.push_back(char(v >> 8));
  }
  return s;
}

std::string Matrix::to_text() const {
  std::ostringstream os;
  for (int i = 0; i < r_; ++i) {
    os << (i ? "; " : "[");
    for (int j = 0; j < c_; ++j) os << (j ? "," : "") << f_->elem_text(at(i, j));
  }
  os << "]";
  return os.str();
}

std::vector<uint16_t> vec_mat(const std::vector<uint16_t>& v, const Matrix& A) {
  const FieldCtx& F = A.ctx();
  std::vector<uint16_t> r(A.cols(), 0);
  for (int i = 0; i < A.rows(); ++i) {
    if (!v[i]) continue;
    const uint16_t* mr = F.mul_row(v[i]);
    for (int j = 0; j < A.cols(); ++j) r[j] = F.add(r[j], mr[A.at(i, j)]);
  }
  return r;
}

uint16_t dot(const FieldCtx& F, const std::vector<uint16_t>& a, const std::vector<uint16_t>& b) {
  uint16_t r = 0;
  for (size_t i = 0; i < a.size(); ++i) r = F.add(r, F.mul(a[i], b[i]));
  return r;
}

std::optional<std::pair<Matrix, Matrix>> lu_decompose(const Matrix& D) {
  if (!D.square()) throw Error(Err::DimensionMismatch, "lu of non-square");
  const FieldCtx& F = D.ctx();
  int n = D.rows();
  Matrix L = Matrix::identity(F, n), U(F, n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      uint16_t s = D.at(i, j);
      for (int k = 0; k < i; ++k) s = F.sub(s, F.mul(L.at(i, k), U.at(k, j)));
      U.set(i, j, s);
    }
    if (!U.at(i, i)) return std::nullopt;
    uint16_t pinv = F.inv(U.at(i, i));
    for (int j = i + 1; j < n; ++j) {
      uint16_t s = D.at(j, i);
      for (int k = 0; k < i; ++k) s = F.sub(s, F.mul(L.at(j, k), U.at(k, i)));
      L.set(j, i, F.mul(s, pinv));
    }
  }
  return std::make_pair(L, U);
}

namespace {

// similarity reduction to upper Hessenberg form
Matrix hessenberg(const Matrix& A) {
  const FieldCtx& F = A.ctx();
  Matrix H = A;
  int n = H.rows();
  for (int col = 0; col + 2 < n; ++col) {
    int piv = -1;
    for (int i = col + 1; i < n; ++i)
      if (H.at(i, col)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != col + 1) {
      for (int j = 0; j < n; ++j) {
        uint16_t t = H.at(piv, j);
        H.set(piv, j, H.at(col + 1, j));
        H.set(col + 1, j, t);
      }
      for (int i = 0; i < n; ++i) {
        uint16_t t = H.at(i, piv);
        H.set(i, piv, H.at(i, col + 1));
        H.set(i, col + 1, t);
      }
    }
    uint16_t pinv = F.inv(H.at(col + 1, col));
    for (int i = col + 2; i < n; ++i) {
      uint16_t m = F.mul(H.at(i, col), pinv);
      if (!m) continue;
      for (int j = 0; j < n; ++j) H.set(i, j, F.sub(H.at(i, j), F.mul(m, H.at(col + 1, j))));
      for (int j = 0; j < n; ++j) H.set(j, col + 1, F.add(H.at(j, col + 1), F.mul(m, H.at(j, i))));
    }
  }
  return H;
}

}  // namespace

Poly charpoly(const Matrix& A) {
  if (!A.square()) throw Error(Err::DimensionMismatch, "charpoly of non-square");
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  if (n == 0) return Poly::constant(F, 1);
  Matrix H = hessenberg(A);
  // p_k = charpoly of the leading k x k block, by last-column expansion
  std::vector<Poly> p;
  p.push_back(Poly::constant(F, 1));
  for (int k = 1; k <= n; ++k) {
    Poly t = Poly(F, {F.neg(H.at(k - 1, k - 1)), 1}) * p[k - 1];
    uint16_t run = 1;
    for (int m = 1; m < k; ++m) {
      run = F.mul(run, H.at(k - m, k - m - 1));
      if (!run) break;
      uint16_t coef = F.mul(H.at(k - 1 - m, k - 1), run);
      if (coef) t = t - p[k - 1 - m] * coef;
    }
    p.push_back(t);
  }
  return p[n];
}

namespace {

// minimal polynomial of a vector: smallest monic f with v f(A) = 0
Poly vector_minpoly(const Matrix& A, const std::vector<uint16_t>& v0) {
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  // echelon rows with tracked Krylov coordinates
  std::vector<std::vector<uint16_t>> rows, coords;
  std::vector<int> pivots;
  std::vector<uint16_t> v = v0;
  for (int step = 0;; ++step) {
    std::vector<uint16_t> r = v, c(step + 1, 0);
    c[step] = 1;
    for (size_t t = 0; t < rows.size(); ++t) {
      uint16_t x = r[pivots[t]];
      if (!x) continue;
      for (int j = 0; j < n; ++j) r[j] = F.sub(r[j], F.mul(x, rows[t][j]));
      for (size_t j = 0; j < coords[t].size(); ++j) c[j] = F.sub(c[j], F.mul(x, coords[t][j]));
    }
    int piv = -1;
    for (int j = 0; j < n; ++j)
      if (r[j]) {
        piv = j;
        break;
      }
    if (piv < 0) return Poly(F, std::move(c)).monic();
    uint16_t pinv = F.inv(r[piv]);
    for (int j = 0; j < n; ++j) r[j] = F.mul(r[j], pinv);
    for (auto& x : c) x = F.mul(x, pinv);
    rows.push_back(std::move(r));
    coords.push_back(std::move(c));
    pivots.push_back(piv);
    v = vec_mat(v, A);
  }
}

}  // namespace

Poly minpoly(const Matrix& A) {
  if (!A.square()) throw Error(Err::DimensionMismatch, "minpoly of non-square");
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  Poly m = Poly::constant(F, 1);
  for (int i = 0; i < n && m.degree() < n; ++i) {
    std::vector<uint16_t> e(n, 0);
    e[i] = 1;
    m = lcm(m, vector_minpoly(A, e));
  }
  return m;
}

Matrix eval_poly(const Poly& f, const Matrix& A) {
  const FieldCtx& F = A.ctx();
  int n = A.rows();
  Matrix acc(F, n, n);
  for (int i = f.degree(); i >= 0; --i) {
    acc = acc * A;
    uint16_t c = f.coeff(i);
    for (int d = 0; d < n; ++d) acc.set(d, d, F.add(acc.at(d, d), c));
  }
  return acc;
}

}  // namespace traceprod
