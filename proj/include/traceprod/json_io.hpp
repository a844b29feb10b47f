#pragma once

#include <json.hpp>

#include "traceprod/witness.hpp"

namespace traceprod {

using ordered_json = nlohmann::ordered_json;

/// Field elements serialize as plain integers over prime fields and as
/// coefficient arrays [c0, c1, ...] over extensions.
ordered_json elem_json(const FieldCtx& F, uint16_t v);
ordered_json field_json(const FieldCtx& F);
ordered_json matrix_json(const Matrix& M);
ordered_json poly_json(const Poly& f);
ordered_json class_json(const AnyClass& c);
ordered_json trace_set_json(const TraceSet& ts);
ordered_json witness_json(const AnyClass& omega, const AnyClass& psi, const WitnessPair& wp);
ordered_json error_json(const Error& e);

}  // namespace traceprod
