// Instance sources, JSON instance files and verdict serialization.
#pragma once

#include "spectainer/containment.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace spectainer {

struct LoadedInstance {
  std::string source;
  LinearPencil pencil;
  /// Set when the source describes a polyhedron; pencil is then its normal form.
  std::optional<HPolyhedronProj> polyhedron;
};

/// Sources: "ball:d:r", "builtin:name", "lift:<source>" or a JSON file path.
LoadedInstance load_instance(const std::string& source);

LinearPencil pencil_from_json(const nlohmann::json& j);
HPolyhedronProj polyhedron_from_json(const nlohmann::json& j);
/// Dispatches on the presence of "rows".
LoadedInstance instance_from_json(const nlohmann::json& j, const std::string& source = "");

nlohmann::json to_json(const LinearPencil& p);
nlohmann::json to_json(const HPolyhedronProj& h);
nlohmann::json to_json(const Verdict& v);

}  // namespace spectainer
