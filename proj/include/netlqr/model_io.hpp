#pragma once

#include <string>

#include "netlqr/json_util.hpp"
#include "netlqr/model.hpp"

namespace netlqr {

inline constexpr const char* kModelFormat = "netlqr-model/1";

Json model_to_json(const ModelSpec& model);

/// Parses a `netlqr-model/1` document. Cost and covariance matrices are
/// symmetrized on input. Throws FormatError on structural problems; call
/// validate() for the admissibility checks.
ModelSpec model_from_json(const Json& j);

ModelSpec load_model(const std::string& path);
void save_model(const std::string& path, const ModelSpec& model);

/// Stable content hash of the model (FNV-1a over the canonical JSON dump).
std::string model_hash(const ModelSpec& model);

}  // namespace netlqr
