#pragma once

#include "xworld/scm.hpp"

#include <string>
#include <string_view>

namespace xworld {

/// Parses the JSON model format without semantic validation.
/// Syntax and schema errors throw ModelError carrying the byte offset or JSON pointer.
ModelSpec parse_model_spec(std::string_view text);

/// parse_model_spec followed by Model::from_spec.
Model parse_model(std::string_view text);

/// Canonical serializer: declaration order, lowest-terms "p/q" marginals,
/// table rows in mixed-radix order with the first parent most significant.
std::string render_model(const ModelSpec& spec);
inline std::string render_model(const Model& model) { return render_model(model.spec()); }

/// Reads a model file from disk. Throws ModelError when unreadable.
Model load_model(const std::string& path);

}  // namespace xworld
