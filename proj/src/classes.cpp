#include "traceprod/classes.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

namespace traceprod {

const char* group_name(Group g) {
  switch (g) {
    case Group::M_similarity: return "M";
    case Group::GL_similarity: return "GL";
    case Group::SL: return "SL";
  }
  return "?";
}

Group group_from_name(const std::string& s) {
  if (s == "M" || s == "M_similarity") return Group::M_similarity;
  if (s == "GL" || s == "GL_similarity") return Group::GL_similarity;
  if (s == "SL") return Group::SL;
  throw Error(Err::Usage, "unknown group '" + s + "'");
}

SimilarityClass::SimilarityClass(const FieldCtx& F, InvariantFactors factors)
    : f_(&F), factors_(std::move(factors)) {
  n_ = factors_.total_degree();
  for (size_t i = 0; i + 1 < factors_.chain.size(); ++i)
    if (!factors_.chain[i].divides(factors_.chain[i + 1]))
      throw Error(Err::Usage, "invariant factors must form a divisibility chain");
  Poly cp = factors_.characteristic();
  // det = (-1)^n * cp(0); trace = -(coefficient of x^{n-1})
  uint16_t c0 = cp.coeff(0);
  det_ = (n_ % 2) ? f_->neg(c0) : c0;
  trace_ = f_->neg(cp.coeff(n_ - 1));
}

bool SimilarityClass::primary() const { return minimal_poly().factor().size() == 1; }

bool SimilarityClass::irreducible() const {
  return minimal_poly().degree() == 2 && minimal_poly().is_irreducible();
}

std::vector<uint16_t> SimilarityClass::rational_eigenvalues() const {
  std::vector<uint16_t> out;
  for (auto& [p, e] : minimal_poly().factor())
    if (p.degree() == 1) out.push_back(f_->neg(p.coeff(0)));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<Poly, int>> SimilarityClass::elementary_divisors() const {
  std::vector<std::pair<Poly, int>> out;
  for (auto& f : factors_.chain)
    for (auto& [p, e] : f.factor()) out.push_back({p, e});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
    if (a.first.key() != b.first.key()) return a.first.key() < b.first.key();
    return a.second < b.second;
  });
  return out;
}

Matrix SimilarityClass::representative() const {
  std::vector<Matrix> blocks;
  for (auto& f : factors_.chain) blocks.push_back(Matrix::companion(f));
  return Matrix::direct_sum(blocks);
}

bool SimilarityClass::operator==(const SimilarityClass& o) const {
  return f_->same_field(*o.f_) && factors_ == o.factors_;
}

std::vector<uint32_t> SimilarityClass::sort_key() const {
  std::vector<uint32_t> k;
  k.push_back(uint32_t(factors_.chain.size()));
  for (auto& f : factors_.chain)
    for (auto v : f.key()) k.push_back(v);
  return k;
}

std::string SimilarityClass::text() const {
  std::ostringstream os;
  for (size_t i = 0; i < factors_.chain.size(); ++i) {
    if (i) os << ',';
    os << factors_.chain[i].to_text();
  }
  return os.str();
}

SLClass::SLClass(SimilarityClass closure, uint16_t label, DetImage image)
    : closure_(std::move(closure)), label_(label), image_(std::move(image)) {
  if (closure_.det() != 1) throw Error(Err::DetNotOne, "SL class needs determinant one");
}

Matrix SLClass::representative() const {
  Matrix base = closure_.representative();
  if (label_ == 1) return base;
  std::vector<uint16_t> d(closure_.n(), 1);
  d[0] = label_;
  return conjugate(base, Matrix::diag(ctx(), d));
}

bool SLClass::operator==(const SLClass& o) const {
  return closure_ == o.closure_ && label_ == o.label_;
}

bool SLClass::operator<(const SLClass& o) const {
  auto a = closure_.sort_key(), b = o.closure_.sort_key();
  if (a != b) return a < b;
  return label_ < o.label_;
}

std::string SLClass::text() const {
  std::ostringstream os;
  os << closure_.text() << "@label=" << ctx().elem_text(label_);
  return os.str();
}

const SimilarityClass& closure_of(const AnyClass& c) {
  if (std::holds_alternative<SimilarityClass>(c)) return std::get<SimilarityClass>(c);
  return std::get<SLClass>(c).closure();
}

Matrix representative(const AnyClass& c) {
  if (std::holds_alternative<SimilarityClass>(c)) return std::get<SimilarityClass>(c).representative();
  return std::get<SLClass>(c).representative();
}

std::string class_text(const AnyClass& c) {
  if (std::holds_alternative<SimilarityClass>(c)) return std::get<SimilarityClass>(c).text();
  return std::get<SLClass>(c).text();
}

SimilarityClass class_of(const Matrix& A) { return SimilarityClass(A.ctx(), invariant_factors(A)); }

namespace {

// det-image computations repeat heavily during verification; cache by
// (field, chain) key
std::mutex g_image_mutex;
std::map<std::string, DetImage> g_image_cache;

DetImage det_image_of_closure(const SimilarityClass& cls) {
  std::string key = cls.ctx().key() + "|" + cls.text();
  {
    std::lock_guard<std::mutex> lock(g_image_mutex);
    auto it = g_image_cache.find(key);
    if (it != g_image_cache.end()) return it->second;
  }
  DetImage img = centralizer_det_image(cls.representative());
  std::lock_guard<std::mutex> lock(g_image_mutex);
  g_image_cache.emplace(key, img);
  return img;
}

}  // namespace

uint16_t coset_label(const FieldCtx& F, uint16_t v, const DetImage& image) {
  uint16_t best = 0;
  for (uint16_t m : image.members) {
    uint16_t x = F.mul(v, m);
    if (!best || x < best) best = x;
  }
  return best;
}

AnyClass class_of(const Matrix& A, Group group) {
  SimilarityClass cls = class_of(A);
  if (group != Group::SL) return cls;
  if (A.det() != 1) throw Error(Err::DetNotOne, "matrix has determinant != 1");
  DetImage img = det_image_of_closure(cls);
  Matrix base = cls.representative();
  Matrix X = find_conjugator(base, A);  // base^X = A
  uint16_t label = coset_label(A.ctx(), X.det(), img);
  return SLClass(std::move(cls), label, std::move(img));
}

std::vector<SLClass> sl_split(const SimilarityClass& closure) {
  if (closure.det() != 1) throw Error(Err::DetNotOne, "closure determinant != 1");
  const FieldCtx& F = closure.ctx();
  DetImage img = det_image_of_closure(closure);
  std::vector<uint16_t> labels;
  for (uint32_t v = 1; v < F.order(); ++v) {
    uint16_t rep = coset_label(F, uint16_t(v), img);
    if (std::find(labels.begin(), labels.end(), rep) == labels.end()) labels.push_back(rep);
  }
  std::sort(labels.begin(), labels.end());
  std::vector<SLClass> out;
  for (uint16_t l : labels) out.push_back(SLClass(closure, l, img));
  return out;
}

namespace {

void partitions_of(int m, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  // descending partitions, lexicographically largest first
  std::function<void(int, int)> rec = [&](int rest, int maxpart) {
    if (rest == 0) {
      out.push_back(cur);
      return;
    }
    for (int part = std::min(rest, maxpart); part >= 1; --part) {
      cur.push_back(part);
      rec(rest - part, part);
      cur.pop_back();
    }
  };
  rec(m, m);
}

}  // namespace

std::vector<AnyClass> enumerate_classes(int n, const FieldCtx& F, Group group) {
  if (n < 1 || n > 8) throw Error(Err::TooLarge, "class enumeration bounded to 1 <= n <= 8");
  // irreducibles of degree <= n, skipping x for the nonsingular groups
  std::vector<Poly> irr;
  for (int d = 1; d <= n; ++d)
    for (auto& p : monic_irreducibles(F, d)) {
      if (group != Group::M_similarity && p.coeff(0) == 0) continue;
      irr.push_back(p);
    }
  std::vector<std::vector<std::vector<int>>> parts(n + 1);
  for (int m = 1; m <= n; ++m) partitions_of(m, parts[m]);

  std::vector<SimilarityClass> classes;
  // assignment: per irreducible a partition of its total multiplicity
  std::vector<std::pair<const Poly*, std::vector<int>>> chosen;
  std::function<void(size_t, int)> rec = [&](size_t idx, int rest) {
    if (rest == 0) {
      int s = 0;
      for (auto& [p, lam] : chosen) s = std::max(s, int(lam.size()));
      InvariantFactors inv;
      // partitions are descending, so part index s-1 yields f_1 and part
      // index 0 yields f_s = the minimal polynomial
      for (int pos = s - 1; pos >= 0; --pos) {
        Poly f = Poly::constant(F, 1);
        for (auto& [p, lam] : chosen)
          if (pos < int(lam.size())) f = f * p->pow(uint32_t(lam[pos]));
        inv.chain.push_back(f);
      }
      classes.push_back(SimilarityClass(F, std::move(inv)));
      return;
    }
    if (idx == irr.size()) return;
    int d = irr[idx].degree();
    rec(idx + 1, rest);  // skip this irreducible
    for (int mult = 1; mult * d <= rest; ++mult) {
      for (auto& lam : parts[mult]) {
        chosen.push_back({&irr[idx], lam});
        rec(idx + 1, rest - mult * d);
        chosen.pop_back();
      }
    }
  };
  rec(0, n);

  std::sort(classes.begin(), classes.end());
  std::vector<AnyClass> out;
  for (auto& c : classes) {
    if (group == Group::SL) {
      if (c.det() != 1) continue;
      for (auto& slc : sl_split(c)) out.push_back(slc);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

int minimal_rank(const Matrix& A) {
  auto inv = invariant_factors(A);
  int n = A.rows();
  int best = 0;
  for (auto& [p, e] : inv.minimal().factor()) {
    int count = 0;
    for (auto& f : inv.chain)
      if (p.divides(f)) ++count;
    best = std::max(best, count);
  }
  return n - best;
}

bool TraceSet::contains(uint16_t v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

// ---- class text parsing ----

namespace {

struct PolyParser {
  const FieldCtx& F;
  const std::string& s;
  size_t pos = 0;

  explicit PolyParser(const FieldCtx& f, const std::string& str) : F(f), s(str) {}

  void skip_ws() {
    while (pos < s.size() && std::isspace(uint8_t(s[pos]))) ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  Poly parse_expr() {
    Poly acc = parse_term();
    for (;;) {
      if (eat('+'))
        acc = acc + parse_term();
      else if (eat('-'))
        acc = acc - parse_term();
      else
        return acc;
    }
  }

  Poly parse_term() {
    Poly acc = parse_factor();
    for (;;) {
      skip_ws();
      if (eat('*')) {
        acc = acc * parse_factor();
      } else if (pos < s.size() && (s[pos] == '(' || s[pos] == 'x' || s[pos] == 'g' || s[pos] == '[')) {
        acc = acc * parse_factor();  // implicit multiplication
      } else {
        return acc;
      }
    }
  }

  Poly parse_factor() {
    Poly base = parse_base();
    skip_ws();
    if (eat('^')) {
      uint32_t e = parse_uint();
      return base.pow(e);
    }
    return base;
  }

  uint32_t parse_uint() {
    skip_ws();
    if (pos >= s.size() || !std::isdigit(uint8_t(s[pos]))) throw Error(Err::ParseError, "expected integer in '" + s + "'");
    uint32_t v = 0;
    while (pos < s.size() && std::isdigit(uint8_t(s[pos]))) v = v * 10 + (s[pos++] - '0');
    return v;
  }

  Poly parse_base() {
    skip_ws();
    if (pos >= s.size()) throw Error(Err::ParseError, "unexpected end of polynomial '" + s + "'");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Poly inner = parse_expr();
      if (!eat(')')) throw Error(Err::ParseError, "missing ')' in '" + s + "'");
      return inner;
    }
    if (c == 'x') {
      ++pos;
      return Poly::x(F);
    }
    if (c == 'g') {
      ++pos;
      if (F.k() < 2) throw Error(Err::ParseError, "'g' only valid over extension fields");
      return Poly::constant(F, F.from_digits({0, 1}));
    }
    if (c == '[') {
      ++pos;
      std::vector<uint32_t> digits;
      for (;;) {
        digits.push_back(parse_uint());
        if (eat(']')) break;
        if (!eat(',')) throw Error(Err::ParseError, "malformed bracket tuple in '" + s + "'");
      }
      return Poly::constant(F, F.from_digits(digits));
    }
    if (std::isdigit(uint8_t(c))) return Poly::constant(F, F.from_int(parse_uint()));
    throw Error(Err::ParseError, std::string("unexpected character '") + c + "' in '" + s + "'");
  }
};

std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == sep && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

Poly parse_poly(const FieldCtx& F, const std::string& text) {
  PolyParser p(F, text);
  Poly r = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) throw Error(Err::ParseError, "trailing input in '" + text + "'");
  return r;
}

uint16_t parse_element(const FieldCtx& F, const std::string& text) {
  Poly p = parse_poly(F, text);
  if (p.degree() > 0) throw Error(Err::ParseError, "'" + text + "' is not a field element");
  return p.coeff(0);
}

AnyClass parse_class_text(const FieldCtx& F, const std::string& text, Group group) {
  auto at_parts = split_top_level(text, '@');
  std::string chain_text = at_parts[0];
  uint16_t label = 1;
  bool has_label = false;
  for (size_t i = 1; i < at_parts.size(); ++i) {
    const std::string& opt = at_parts[i];
    if (opt.rfind("label=", 0) != 0) throw Error(Err::ParseError, "unknown class option '" + opt + "'");
    label = parse_element(F, opt.substr(6));
    has_label = true;
  }
  InvariantFactors inv;
  for (auto& part : split_top_level(chain_text, ',')) {
    Poly f = parse_poly(F, part);
    if (f.degree() < 1 || !f.is_monic())
      throw Error(Err::ParseError, "invariant factor '" + part + "' must be monic of degree >= 1");
    inv.chain.push_back(f);
  }
  std::sort(inv.chain.begin(), inv.chain.end(),
            [](const Poly& a, const Poly& b) {
              if (a.degree() != b.degree()) return a.degree() < b.degree();
              return a.key() < b.key();
            });
  SimilarityClass cls(F, std::move(inv));
  if (group != Group::SL) {
    if (has_label) throw Error(Err::ParseError, "@label is only valid for SL classes");
    return cls;
  }
  if (cls.det() != 1) throw Error(Err::DetNotOne, "SL class text must have determinant one");
  DetImage img = det_image_of_closure(cls);
  uint16_t canonical = coset_label(F, label, img);
  return SLClass(std::move(cls), canonical, std::move(img));
}

}  // namespace traceprod
