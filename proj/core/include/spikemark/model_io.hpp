#pragma once

#include <string>

#include "spikemark/model.hpp"

namespace spikemark {

/// Serialize a model description as canonical JSON text. The format is
/// self-describing: each layer is {"name", "kind", ...kind-specific fields};
/// weights are row-major flat arrays next to their dimensions. Deserializing
/// and rebuilding yields a graph that runs identically.
std::string model_to_json(const model_desc& d);
model_desc model_from_json(const std::string& text);

void save_model(const std::string& path, const model_desc& d);
model_desc load_model(const std::string& path);

}  // namespace spikemark
