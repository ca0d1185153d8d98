#pragma once

#include <json.hpp>

#include <string>

#include "netlqr/linalg.hpp"

namespace netlqr {

using Json = nlohmann::json;

/// Row-major array of row arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& what);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& what);

/// True if `j` looks like a matrix (array of arrays of numbers).
bool is_matrix_json(const Json& j);

/// 64-bit FNV-1a of `bytes`, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

Json read_json_file(const std::string& path);
/// Writes `j` pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace netlqr
