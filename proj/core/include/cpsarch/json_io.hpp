#pragma once

#include <string>
#include <string_view>

#include "cpsarch/errors.hpp"
#include "cpsarch/model.hpp"

namespace cpsarch {

/// Version of the JSON model interchange schema (see docs/formats.md).
inline constexpr std::string_view kModelSchemaVersion = "1";

/// Parses a JSON model document. Unknown fields are ignored. Throws
/// ParseError (malformed JSON), SchemaError (missing required field or
/// unsupported schema_version) or InvalidModel (model fails validate()).
Model parse_json_model(std::string_view bytes);

/// Serializes a valid model to the canonical document form: blocks sorted
/// by id, connections sorted by (src, src_port, dst, dst_port), two-space
/// indentation. parse_json_model(export_json_model(m)) == m, and a second
/// export of the re-parsed model is byte-identical.
std::string export_json_model(const Model& model);

}  // namespace cpsarch
