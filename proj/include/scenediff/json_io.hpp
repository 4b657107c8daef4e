#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "scenediff/object_tree.hpp"
#include "scenediff/shape_library.hpp"
#include "scenediff/types.hpp"

namespace scenediff {

nlohmann::ordered_json library_to_json(const SyntheticShapeLibrary& lib);
SyntheticShapeLibrary library_from_json(const nlohmann::json& j);

/// Nodes with intervals and member object records, per axis.
nlohmann::ordered_json tree_to_json(const SpatialObjectTree& tree);

void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

}  // namespace scenediff
