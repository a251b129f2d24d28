#pragma once

// Matrix JSON: {"n": int, "re": [[...]], "im": [[...]]}, row-major.

#include <string>

#include <json.hpp>

#include "cpair/matrix.hpp"

namespace cpair {

nlohmann::json matrix_to_json(const CMatrix& m);
/// Accepts square n x n data; "im" may be omitted. InvalidMatrix on shape
/// errors. Hermitian inputs are symmetrized by the HermitianMatrix ctor.
CMatrix matrix_from_json(const nlohmann::json& j);

HermitianMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const CMatrix& m);

/// Real vector as a JSON array.
nlohmann::json vector_to_json(const RVector& v);

}  // namespace cpair
