#include "traceprod/json_io.hpp"

namespace traceprod {

ordered_json elem_json(const FieldCtx& F, uint16_t v) {
  if (F.k() == 1) return ordered_json(v);
  ordered_json arr = ordered_json::array();
  for (auto d : F.digits(v)) arr.push_back(d);
  return arr;
}

ordered_json field_json(const FieldCtx& F) {
  ordered_json j;
  j["p"] = F.p();
  j["k"] = F.k();
  j["modulus"] = F.modulus();
  return j;
}

ordered_json matrix_json(const Matrix& M) {
  ordered_json j;
  j["n"] = M.rows();
  j["field"] = field_json(M.ctx());
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < M.cols(); ++c) row.push_back(elem_json(M.ctx(), M.at(i, c)));
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

ordered_json poly_json(const Poly& f) {
  ordered_json arr = ordered_json::array();  // constant term first
  for (int i = 0; i <= f.degree(); ++i) arr.push_back(elem_json(f.ctx(), f.coeff(i)));
  return arr;
}

ordered_json class_json(const AnyClass& c) {
  const SimilarityClass& cls = closure_of(c);
  ordered_json j;
  j["chain"] = cls.text();
  ordered_json factors = ordered_json::array();
  for (auto& f : cls.factors().chain) factors.push_back(poly_json(f));
  j["invariant_factors"] = factors;
  j["n"] = cls.n();
  j["det"] = elem_json(cls.ctx(), cls.det());
  j["trace"] = elem_json(cls.ctx(), cls.trace());
  j["scalar"] = cls.scalar();
  j["cyclic"] = cls.cyclic();
  if (std::holds_alternative<SLClass>(c)) {
    const auto& slc = std::get<SLClass>(c);
    j["label"] = elem_json(slc.ctx(), slc.label());
    j["splits_into"] = slc.split_count();
    j["similarity_class"] = slc.is_similarity_class();
    j["det_image_certified"] = slc.det_image().certified;
  }
  return j;
}

ordered_json trace_set_json(const TraceSet& ts) {
  ordered_json j;
  ordered_json members = ordered_json::array();
  for (auto v : ts.members) members.push_back(elem_json(*ts.ctx, v));
  j["members"] = members;
  j["complete"] = ts.complete;
  return j;
}

ordered_json witness_json(const AnyClass& omega, const AnyClass& psi, const WitnessPair& wp) {
  ordered_json j;
  j["omega"] = class_text(omega);
  j["psi"] = class_text(psi);
  j["tau"] = elem_json(closure_of(omega).ctx(), wp.tau);
  j["W"] = matrix_json(wp.W);
  j["Q"] = matrix_json(wp.Q);
  j["product"] = matrix_json(wp.product);
  ordered_json prov;
  prov["path"] = wp.path;
  ordered_json steps = ordered_json::array();
  for (auto& [name, mat] : wp.steps) steps.push_back({{"op", name}, {"matrix", matrix_json(mat)}});
  prov["steps"] = steps;
  j["provenance"] = prov;
  return j;
}

ordered_json error_json(const Error& e) {
  ordered_json j;
  j["error"] = {{"kind", err_name(e.kind())}, {"message", e.what()}};
  return j;
}

}  // namespace traceprod
