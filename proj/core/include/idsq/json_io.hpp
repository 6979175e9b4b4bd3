#pragma once

#include <nlohmann/json.hpp>

#include "idsq/criteria.hpp"
#include "idsq/matrix.hpp"
#include "idsq/model.hpp"
#include "idsq/tracesum.hpp"

namespace idsq {

// Readers throw InvalidArgument on missing or mistyped fields; model and
// family validation errors propagate unchanged.

// {"rows": r, "cols": c, "entries": [row-major]}, or a nested array of rows.
nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

// {"dim": n, "entries": [row-major]}, or a nested array of rows.
nlohmann::json to_json(const SymMatrix& m);
SymMatrix sym_from_json(const nlohmann::json& j);

// {"sigma": <SymMatrix>, "n1": n1, "n2": n2, "a": a}
nlohmann::json to_json(const CovarianceModel& model);
CovarianceModel model_from_json(const nlohmann::json& j);

// {"q": <SymMatrix>, "n1": n1, "n2": n2}
nlohmann::json to_json(const BlockMatrix& q);
BlockMatrix block_from_json(const nlohmann::json& j);

// {"kind": "resolvent" | "precision", "diagonal": [4], "delta": d, "epsilon": e}
nlohmann::json to_json(const DeltaEpsilonFamily& family);
DeltaEpsilonFamily family_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SignatureMatrix& u);
nlohmann::json to_json(const CriterionReport& report);
nlohmann::json to_json(const GridCell& cell);

}  // namespace idsq
